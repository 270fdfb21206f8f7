#include "eigenmarket/corrcore.hpp"

#include "eigenmarket/error.hpp"
#include "eigenmarket/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace eigenmarket {

StandardizedPanel standardize(const ReturnPanel& rp) { return standardize(rp.instruments, rp.returns); }

StandardizedPanel standardize(const std::vector<InstrumentMeta>& instruments, const RowMatrix& rows) {
    if (static_cast<std::size_t>(rows.rows()) != instruments.size()) {
        throw Error(ErrorKind::Integrity, "corrcore", "row count does not match instrument list");
    }
    if (rows.cols() < 1) throw Error(ErrorKind::Parameter, "corrcore", "cannot standardize empty series");

    StandardizedPanel sp{instruments, RowMatrix(rows.rows(), rows.cols())};
    const double t = static_cast<double>(rows.cols());
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        const auto r = rows.row(i);
        if (r.minCoeff() == r.maxCoeff()) {
            throw Error(ErrorKind::Domain, "corrcore",
                        "instrument " + instruments[static_cast<std::size_t>(i)].label.str() +
                            " has zero return variance; standardization requires sigma > 0");
        }
        auto g = sp.g.row(i);
        g = r.array() - r.mean();
        // Second pass removes the residual mean left by round-off.
        g.array() -= g.mean();
        const double sigma = std::sqrt(g.squaredNorm() / t);
        if (!(sigma > 0.0) || !std::isfinite(sigma)) {
            throw Error(ErrorKind::Domain, "corrcore",
                        "instrument " + instruments[static_cast<std::size_t>(i)].label.str() +
                            " has zero return variance; standardization requires sigma > 0");
        }
        g /= sigma;
    }
    return sp;
}

std::optional<std::size_t> CorrelationMatrix::index_of(InstrumentLabel label) const {
    for (std::size_t i = 0; i < instruments.size(); ++i) {
        if (instruments[i].label == label) return i;
    }
    return std::nullopt;
}

CorrelationMatrix correlation_matrix(const StandardizedPanel& sp) {
    const auto n = sp.g.rows();
    const double t = static_cast<double>(sp.g.cols());
    CorrelationMatrix cm{sp.instruments, Eigen::MatrixXd::Identity(n, n)};
    // Each entry is its own dot product; only the upper triangle is computed
    // and mirrored, so the matrix is exactly symmetric.
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t ui) {
        const auto i = static_cast<Eigen::Index>(ui);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double c = std::clamp(sp.g.row(i).dot(sp.g.row(j)) / t, -1.0, 1.0);
            cm.c(i, j) = c;
            cm.c(j, i) = c;
        }
    });
    return cm;
}

CorrelationMatrix correlate(const ReturnPanel& rp) { return correlation_matrix(standardize(rp)); }

std::vector<double> off_diagonal(const CorrelationMatrix& cm) {
    const auto n = cm.c.rows();
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) out.push_back(cm.c(i, j));
    }
    return out;
}

CoefficientDistribution coefficient_distribution(const CorrelationMatrix& cm, int bins) {
    if (bins < 1) throw Error(ErrorKind::Parameter, "corrcore", "bin count must be >= 1, got " + std::to_string(bins));
    if (cm.size() < 2) throw Error(ErrorKind::Parameter, "corrcore", "coefficient distribution needs N >= 2");
    const auto values = off_diagonal(cm);
    const MomentSummary s = summarize(values);
    CoefficientDistribution d;
    d.histogram = density_histogram(values, bins, -1.0, 1.0);
    d.pairs = values.size();
    d.mean = s.mean;
    d.sd = s.sd;
    d.skewness = s.skewness;
    d.kurtosis = s.kurtosis;
    return d;
}

void write_matrix_csv(std::ostream& out, const CorrelationMatrix& cm, const NumberFormat& fmt) {
    out << "label";
    for (const auto& m : cm.instruments) out << ',' << m.label.str();
    out << '\n';
    for (std::size_t i = 0; i < cm.size(); ++i) {
        out << cm.instruments[i].label.str();
        for (std::size_t j = 0; j < cm.size(); ++j) {
            out << ',' << fmt(cm.c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        }
        out << '\n';
    }
}

void write_histogram_csv(std::ostream& out, const Histogram& hist, const NumberFormat& fmt) {
    out << "bin_left,bin_right,density\n";
    for (std::size_t i = 0; i < hist.bins(); ++i) {
        out << fmt(hist.edges[i]) << ',' << fmt(hist.edges[i + 1]) << ',' << fmt(hist.densities[i]) << '\n';
    }
}

}  // namespace eigenmarket
