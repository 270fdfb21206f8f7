/**
 * @file spectrum.hpp
 * @brief Eigendecomposition of correlation matrices and the Marchenko-Pastur
 *        reference law for uncorrelated series.
 */
#pragma once

#include "eigenmarket/corrcore.hpp"
#include "eigenmarket/histogram.hpp"

#include <Eigen/Core>

#include <optional>
#include <utility>
#include <vector>

namespace eigenmarket {

/// Eigenvalues in descending order. Column k-1 of `eigenvectors` is u^k.
///
/// Each eigenvector is oriented so its component sum is non-negative. When the
/// sum is zero within round-off, the largest-magnitude component (first one on
/// ties) is made positive instead.
struct SpectralDecomposition {
    std::vector<InstrumentMeta> instruments;
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;

    std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
    /// 1-based rank, as in u^1 for the largest eigenvalue.
    Eigen::VectorXd vector(int rank) const;
    double value(int rank) const;
};

/// Throws Error{Numerical} if the symmetric solver does not converge.
SpectralDecomposition decompose(const CorrelationMatrix& cm);
SpectralDecomposition decompose(const Eigen::MatrixXd& symmetric, std::vector<InstrumentMeta> instruments = {});

/// Applies the orientation rule described on SpectralDecomposition.
void orient(Eigen::Ref<Eigen::VectorXd> v);

/// Max-norm deviations used to check a decomposition against its source matrix.
struct SpectralResiduals {
    double reconstruction = 0.0;  ///< max |C - U diag(lambda) U^T|
    double orthonormality = 0.0;  ///< max |U^T U - I|
    double trace = 0.0;           ///< |sum(lambda) - trace(C)|
};

SpectralResiduals spectral_residuals(const SpectralDecomposition& sd, const Eigen::MatrixXd& c);

/// Limiting eigenvalue density of a correlation matrix of N uncorrelated
/// series of length T, with Q = T/N.
struct MarchenkoPasturLaw {
    double q = 0.0;
    double lambda_min = 0.0;
    double lambda_max = 0.0;

    /// Zero outside [lambda_min, lambda_max].
    double density(double lambda) const;
};

/// Requires t > n >= 1; Error{Parameter} otherwise.
MarchenkoPasturLaw mp_law(std::size_t n, std::size_t t);
/// Requires q > 1.
MarchenkoPasturLaw mp_law_for_ratio(double q);

inline double mp_density(const MarchenkoPasturLaw& law, double lambda) { return law.density(lambda); }

/// Normalized eigenvalue histogram. Without an explicit range the bins span
/// [lambda_N, lambda_1]; a degenerate spectrum gets a unit-wide window around it.
Histogram empirical_density(const SpectralDecomposition& sd, int bins,
                            std::optional<std::pair<double, double>> range = std::nullopt);

enum class SpectralClass { Below, Bulk, Above };

const char* to_string(SpectralClass cls);

/// Ranks (1-based) partitioned by strict comparison with the law's bounds.
struct DeviationReport {
    std::vector<int> below;
    std::vector<int> bulk;
    std::vector<int> above;

    SpectralClass class_of(int rank) const;
};

DeviationReport classify_deviations(const SpectralDecomposition& sd, const MarchenkoPasturLaw& law);

/// `rank,lambda,class`
void write_eigenvalues_csv(std::ostream& out, const SpectralDecomposition& sd, const DeviationReport& dev,
                           const NumberFormat& fmt);

}  // namespace eigenmarket
