#include "eigenmarket/spectrum.hpp"

#include "eigenmarket/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>
#include <tuple>

namespace eigenmarket {

namespace {

constexpr const char* kModule = "spectrum";

std::string diagnostics(const Eigen::MatrixXd& m) {
    std::ostringstream os;
    const Eigen::MatrixXd asym = m - m.transpose();
    os << "N=" << m.rows() << ", frobenius=" << m.norm() << ", max|asymmetry|=" << asym.cwiseAbs().maxCoeff()
       << ", diag range=[" << m.diagonal().minCoeff() << ", " << m.diagonal().maxCoeff() << "]"
       << ", max|offdiag|=" << (m - Eigen::MatrixXd(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff();
    return os.str();
}

}  // namespace

Eigen::VectorXd SpectralDecomposition::vector(int rank) const {
    if (rank < 1 || static_cast<std::size_t>(rank) > size()) {
        throw Error(ErrorKind::Parameter, kModule,
                    "rank " + std::to_string(rank) + " outside 1.." + std::to_string(size()));
    }
    return eigenvectors.col(rank - 1);
}

double SpectralDecomposition::value(int rank) const {
    if (rank < 1 || static_cast<std::size_t>(rank) > size()) {
        throw Error(ErrorKind::Parameter, kModule,
                    "rank " + std::to_string(rank) + " outside 1.." + std::to_string(size()));
    }
    return eigenvalues(rank - 1);
}

void orient(Eigen::Ref<Eigen::VectorXd> v) {
    const double sum = v.sum();
    const double tol = 1e-12 * std::sqrt(static_cast<double>(v.size()));
    if (sum > tol) return;
    if (sum < -tol) {
        v = -v;
        return;
    }
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i) {
        if (std::abs(v(i)) > std::abs(v(arg))) arg = i;
    }
    if (v(arg) < 0.0) v = -v;
}

SpectralDecomposition decompose(const CorrelationMatrix& cm) { return decompose(cm.c, cm.instruments); }

SpectralDecomposition decompose(const Eigen::MatrixXd& symmetric, std::vector<InstrumentMeta> instruments) {
    const auto n = symmetric.rows();
    if (n < 1 || symmetric.cols() != n) {
        throw Error(ErrorKind::Parameter, kModule, "decomposition needs a non-empty square matrix");
    }
    if (!symmetric.allFinite()) {
        throw Error(ErrorKind::Numerical, kModule, "matrix has non-finite entries (" + diagnostics(symmetric) + ")");
    }
    if (!instruments.empty() && static_cast<Eigen::Index>(instruments.size()) != n) {
        throw Error(ErrorKind::Integrity, kModule, "instrument list does not match matrix size");
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::Numerical, kModule, "symmetric eigensolver did not converge (" + diagnostics(symmetric) + ")");
    }

    SpectralDecomposition sd;
    sd.instruments = std::move(instruments);
    sd.eigenvalues.resize(n);
    sd.eigenvectors.resize(n, n);
    // The solver sorts ascending.
    for (Eigen::Index k = 0; k < n; ++k) {
        sd.eigenvalues(k) = solver.eigenvalues()(n - 1 - k);
        sd.eigenvectors.col(k) = solver.eigenvectors().col(n - 1 - k);
        orient(sd.eigenvectors.col(k));
    }
    return sd;
}

SpectralResiduals spectral_residuals(const SpectralDecomposition& sd, const Eigen::MatrixXd& c) {
    const auto& u = sd.eigenvectors;
    const auto n = u.cols();
    SpectralResiduals r;
    r.reconstruction = (c - u * sd.eigenvalues.asDiagonal() * u.transpose()).cwiseAbs().maxCoeff();
    r.orthonormality = (u.transpose() * u - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
    r.trace = std::abs(sd.eigenvalues.sum() - c.trace());
    return r;
}

double MarchenkoPasturLaw::density(double lambda) const {
    if (!(lambda > lambda_min && lambda < lambda_max)) return 0.0;
    return q / (2.0 * std::numbers::pi) * std::sqrt((lambda_max - lambda) * (lambda - lambda_min)) / lambda;
}

MarchenkoPasturLaw mp_law(std::size_t n, std::size_t t) {
    if (n < 1) throw Error(ErrorKind::Parameter, kModule, "instrument count must be >= 1");
    if (t <= n) {
        throw Error(ErrorKind::Parameter, kModule,
                    "series length T=" + std::to_string(t) + " must exceed N=" + std::to_string(n) + " (Q > 1)");
    }
    return mp_law_for_ratio(static_cast<double>(t) / static_cast<double>(n));
}

MarchenkoPasturLaw mp_law_for_ratio(double q) {
    if (!(q > 1.0) || !std::isfinite(q)) {
        throw Error(ErrorKind::Parameter, kModule, "aspect ratio Q must be finite and > 1");
    }
    const double inv = 1.0 / q;
    const double root = std::sqrt(inv);
    return {q, 1.0 + inv - 2.0 * root, 1.0 + inv + 2.0 * root};
}

Histogram empirical_density(const SpectralDecomposition& sd, int bins, std::optional<std::pair<double, double>> range) {
    if (bins < 1) throw Error(ErrorKind::Parameter, kModule, "bin count must be >= 1, got " + std::to_string(bins));
    if (sd.size() == 0) throw Error(ErrorKind::Parameter, kModule, "empty spectrum");
    double lo = 0.0, hi = 0.0;
    if (range) {
        std::tie(lo, hi) = *range;
    } else {
        lo = sd.eigenvalues.minCoeff();
        hi = sd.eigenvalues.maxCoeff();
        if (!(lo < hi)) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
    const std::vector<double> values(sd.eigenvalues.data(), sd.eigenvalues.data() + sd.eigenvalues.size());
    return density_histogram(values, bins, lo, hi);
}

const char* to_string(SpectralClass cls) {
    switch (cls) {
        case SpectralClass::Below: return "below";
        case SpectralClass::Bulk: return "bulk";
        case SpectralClass::Above: return "above";
    }
    return "?";
}

SpectralClass DeviationReport::class_of(int rank) const {
    if (std::find(below.begin(), below.end(), rank) != below.end()) return SpectralClass::Below;
    if (std::find(above.begin(), above.end(), rank) != above.end()) return SpectralClass::Above;
    return SpectralClass::Bulk;
}

DeviationReport classify_deviations(const SpectralDecomposition& sd, const MarchenkoPasturLaw& law) {
    DeviationReport rep;
    for (std::size_t k = 0; k < sd.size(); ++k) {
        const double v = sd.eigenvalues(static_cast<Eigen::Index>(k));
        const int rank = static_cast<int>(k) + 1;
        if (v < law.lambda_min) {
            rep.below.push_back(rank);
        } else if (v > law.lambda_max) {
            rep.above.push_back(rank);
        } else {
            rep.bulk.push_back(rank);
        }
    }
    return rep;
}

void write_eigenvalues_csv(std::ostream& out, const SpectralDecomposition& sd, const DeviationReport& dev,
                           const NumberFormat& fmt) {
    out << "rank,lambda,class\n";
    for (std::size_t k = 0; k < sd.size(); ++k) {
        const int rank = static_cast<int>(k) + 1;
        out << rank << ',' << fmt(sd.eigenvalues(static_cast<Eigen::Index>(k))) << ',' << to_string(dev.class_of(rank))
            << '\n';
    }
}

}  // namespace eigenmarket
