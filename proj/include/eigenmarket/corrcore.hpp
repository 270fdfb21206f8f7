/**
 * @file corrcore.hpp
 * @brief Standardized returns, the Pearson correlation matrix and the
 *        distribution of its off-diagonal coefficients.
 */
#pragma once

#include "eigenmarket/histogram.hpp"
#include "eigenmarket/returns.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace eigenmarket {

/// Rows have zero mean and unit population variance.
struct StandardizedPanel {
    std::vector<InstrumentMeta> instruments;
    RowMatrix g;
};

/// g_i(t) = (r_i(t) - <r_i>) / sigma_i with population sigma.
/// Throws Error{Domain} naming the first constant row.
StandardizedPanel standardize(const ReturnPanel& rp);
StandardizedPanel standardize(const std::vector<InstrumentMeta>& instruments, const RowMatrix& rows);

/// Symmetric, unit diagonal, entries clamped to [-1, 1].
struct CorrelationMatrix {
    std::vector<InstrumentMeta> instruments;
    Eigen::MatrixXd c;

    std::size_t size() const { return instruments.size(); }
    /// Index of the instrument with this label, if present.
    std::optional<std::size_t> index_of(InstrumentLabel label) const;
};

/// c_ij = <g_i g_j> averaged over time.
CorrelationMatrix correlation_matrix(const StandardizedPanel& sp);

/// Convenience for standardize followed by correlation_matrix.
CorrelationMatrix correlate(const ReturnPanel& rp);

inline constexpr int kDefaultBins = 50;

struct CoefficientDistribution {
    Histogram histogram;   ///< uniform bins over [-1, 1]
    std::size_t pairs = 0; ///< N(N-1)/2
    double mean = 0.0;
    double sd = 0.0;
    std::optional<double> skewness;
    std::optional<double> kurtosis;
};

/// Upper-triangle coefficients c_ij, i < j, in row order.
std::vector<double> off_diagonal(const CorrelationMatrix& cm);

CoefficientDistribution coefficient_distribution(const CorrelationMatrix& cm, int bins = kDefaultBins);

void write_matrix_csv(std::ostream& out, const CorrelationMatrix& cm, const NumberFormat& fmt);
/// `bin_left,bin_right,density`
void write_histogram_csv(std::ostream& out, const Histogram& hist, const NumberFormat& fmt);

}  // namespace eigenmarket
