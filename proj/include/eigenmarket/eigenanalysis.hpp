/**
 * @file eigenanalysis.hpp
 * @brief Inverse participation ratios, eigenportfolios, the market-effect
 *        linearity test and the eigenportfolio price index.
 */
#pragma once

#include "eigenmarket/returns.hpp"
#include "eigenmarket/spectrum.hpp"

#include <Eigen/Core>

#include <vector>

namespace eigenmarket {

/// I^k = sum_l (u^k_l)^4, one value per rank.
struct IPRSeries {
    std::vector<double> values;
    double mean = 0.0;
};

double inverse_participation_ratio(const Eigen::VectorXd& u);
IPRSeries ipr(const SpectralDecomposition& sd);

/// Portfolio weighted by u^k, returns normalized by the component sum.
struct Eigenportfolio {
    int rank = 0;
    Eigen::VectorXd weights;
    double normalizer = 0.0;  ///< sum_j u^k_j
    Date base_date;
    std::vector<Date> dates;
    Eigen::VectorXd returns;  ///< G^k(t)
};

/// |sum u| below this multiple of sqrt(N) makes the normalization undefined.
inline constexpr double kDegenerateNormalizer = 1e-6;

/// G^k(t) = sum_j u_j r_j(t) / sum_j u_j over raw returns.
/// Throws Error{Domain} when the normalizer is degenerate.
Eigenportfolio eigenportfolio(const SpectralDecomposition& sd, const ReturnPanel& rp, int rank);
Eigenportfolio eigenportfolio(const Eigen::VectorXd& weights, const ReturnPanel& rp, int rank);

/// OLS of <r>(t) on G^k(t).
struct LinearityTest {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

LinearityTest linearity_test(const Eigenportfolio& ep, const ReturnPanel& rp);
/// Same fit against an explicit response series.
LinearityTest linear_fit(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Price index built from an eigenportfolio: values[0] = base at base_date,
/// values[t] = base * exp(G(1) + ... + G(t)).
struct IndexSeries {
    std::vector<Date> dates;
    std::vector<double> values;
    double base = 0.0;
};

IndexSeries afpi(const Eigenportfolio& ep, double base_price);

}  // namespace eigenmarket
