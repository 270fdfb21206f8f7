#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace eigenmarket {

/// Density-normalized histogram with uniform bins. Bin i covers
/// [edges[i], edges[i+1]); the last bin is closed on the right.
struct Histogram {
    std::vector<double> edges;
    std::vector<double> densities;
    std::vector<std::size_t> counts;

    std::size_t bins() const { return densities.size(); }
    double bin_width() const;
    double integral() const;
};

/// Values outside [lo, hi] are ignored. Requires bins >= 1 and lo < hi.
Histogram density_histogram(std::span<const double> values, int bins, double lo, double hi);

/// Population moments of a sample; skewness and kurtosis are unset when the variance is zero.
struct MomentSummary {
    std::size_t count = 0;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double variance = 0.0;
    double sd = 0.0;
    std::optional<double> skewness;
    std::optional<double> kurtosis;  ///< raw, Gaussian = 3
};

MomentSummary summarize(std::span<const double> values);

}  // namespace eigenmarket
