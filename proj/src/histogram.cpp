#include "eigenmarket/histogram.hpp"

#include "eigenmarket/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace eigenmarket {

double Histogram::bin_width() const { return edges.size() < 2 ? 0.0 : edges[1] - edges[0]; }

double Histogram::integral() const {
    double total = 0.0;
    for (std::size_t i = 0; i < densities.size(); ++i) total += densities[i] * (edges[i + 1] - edges[i]);
    return total;
}

Histogram density_histogram(std::span<const double> values, int bins, double lo, double hi) {
    if (bins < 1) throw Error(ErrorKind::Parameter, "histogram", "bin count must be >= 1, got " + std::to_string(bins));
    if (!(lo < hi)) throw Error(ErrorKind::Parameter, "histogram", "histogram range must satisfy lo < hi");

    Histogram h;
    const auto nb = static_cast<std::size_t>(bins);
    h.edges.resize(nb + 1);
    const double width = (hi - lo) / bins;
    for (std::size_t i = 0; i <= nb; ++i) h.edges[i] = lo + width * static_cast<double>(i);
    h.edges[nb] = hi;
    h.counts.assign(nb, 0);

    std::size_t used = 0;
    for (double v : values) {
        if (!(v >= lo && v <= hi)) continue;
        auto idx = static_cast<std::size_t>(std::floor((v - lo) / width));
        idx = std::min(idx, nb - 1);
        // Guard the floor against edges computed with round-off.
        while (idx > 0 && v < h.edges[idx]) --idx;
        while (idx + 1 < nb && v >= h.edges[idx + 1]) ++idx;
        ++h.counts[idx];
        ++used;
    }
    h.densities.assign(nb, 0.0);
    if (used > 0) {
        for (std::size_t i = 0; i < nb; ++i) {
            h.densities[i] = static_cast<double>(h.counts[i]) /
                             (static_cast<double>(used) * (h.edges[i + 1] - h.edges[i]));
        }
    }
    return h;
}

MomentSummary summarize(std::span<const double> values) {
    MomentSummary s;
    s.count = values.size();
    if (values.empty()) return s;
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    s.min = *mn;
    s.max = *mx;
    const double n = static_cast<double>(values.size());
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : values) {
        const double d = v - s.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (s.min == s.max) m2 = m3 = m4 = 0.0;
    s.variance = m2;
    s.sd = std::sqrt(m2);
    if (m2 > 0.0) {
        s.skewness = m3 / std::pow(m2, 1.5);
        s.kurtosis = m4 / (m2 * m2);
    }
    // The mean of a sample lies within its range; clamp the last-ulp overshoot.
    s.mean = std::clamp(s.mean, s.min, s.max);
    return s;
}

}  // namespace eigenmarket
