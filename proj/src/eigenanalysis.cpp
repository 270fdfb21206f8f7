#include "eigenmarket/eigenanalysis.hpp"

#include "eigenmarket/error.hpp"

#include <algorithm>
#include <cmath>

namespace eigenmarket {

namespace {
constexpr const char* kModule = "eigenanalysis";
}

double inverse_participation_ratio(const Eigen::VectorXd& u) { return u.array().pow(4).sum(); }

IPRSeries ipr(const SpectralDecomposition& sd) {
    IPRSeries out;
    out.values.reserve(sd.size());
    for (Eigen::Index k = 0; k < sd.eigenvectors.cols(); ++k) {
        out.values.push_back(inverse_participation_ratio(sd.eigenvectors.col(k)));
    }
    double total = 0.0;
    for (double v : out.values) total += v;
    out.mean = out.values.empty() ? 0.0 : total / static_cast<double>(out.values.size());
    return out;
}

Eigenportfolio eigenportfolio(const SpectralDecomposition& sd, const ReturnPanel& rp, int rank) {
    if (rank < 1 || static_cast<std::size_t>(rank) > sd.size()) {
        throw Error(ErrorKind::Parameter, kModule,
                    "eigenportfolio rank " + std::to_string(rank) + " outside 1.." + std::to_string(sd.size()));
    }
    return eigenportfolio(sd.vector(rank), rp, rank);
}

Eigenportfolio eigenportfolio(const Eigen::VectorXd& weights, const ReturnPanel& rp, int rank) {
    if (static_cast<std::size_t>(weights.size()) != rp.instrument_count()) {
        throw Error(ErrorKind::Integrity, kModule, "eigenvector length does not match the return panel");
    }
    const double normalizer = weights.sum();
    const double limit = kDegenerateNormalizer * std::sqrt(static_cast<double>(weights.size()));
    if (!(std::abs(normalizer) >= limit)) {
        throw Error(ErrorKind::Domain, kModule,
                    "eigenportfolio " + std::to_string(rank) + " is degenerate: component sum " +
                        std::to_string(normalizer) + " is below " + std::to_string(limit));
    }
    Eigenportfolio ep;
    ep.rank = rank;
    ep.weights = weights;
    ep.normalizer = normalizer;
    ep.base_date = rp.base_date;
    ep.dates = rp.dates;
    ep.returns = (rp.returns.transpose() * weights) / normalizer;
    return ep;
}

LinearityTest linear_fit(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    if (x.size() != y.size()) throw Error(ErrorKind::Integrity, kModule, "regression series lengths differ");
    if (x.size() < 3) throw Error(ErrorKind::Parameter, kModule, "regression needs at least 3 points");
    const double n = static_cast<double>(x.size());
    const Eigen::ArrayXd dx = x.array() - x.mean();
    const Eigen::ArrayXd dy = y.array() - y.mean();
    const double sxx = (dx * dx).sum() / n;
    const double syy = (dy * dy).sum() / n;
    const double sxy = (dx * dy).sum() / n;
    if (!(sxx > 0.0)) throw Error(ErrorKind::Domain, kModule, "regressor has zero variance; fit is undefined");

    LinearityTest fit;
    fit.slope = sxy / sxx;
    fit.intercept = y.mean() - fit.slope * x.mean();
    // A constant response has nothing to explain.
    fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 0.0;
    return fit;
}

LinearityTest linearity_test(const Eigenportfolio& ep, const ReturnPanel& rp) {
    return linear_fit(ep.returns, mean_return(rp));
}

IndexSeries afpi(const Eigenportfolio& ep, double base_price) {
    if (!(base_price > 0.0) || !std::isfinite(base_price)) {
        throw Error(ErrorKind::Parameter, kModule, "index base price must be positive");
    }
    IndexSeries idx;
    idx.base = base_price;
    idx.dates.reserve(ep.dates.size() + 1);
    idx.values.reserve(ep.dates.size() + 1);
    idx.dates.push_back(ep.base_date);
    idx.values.push_back(base_price);
    double cumulative = 0.0;
    for (Eigen::Index t = 0; t < ep.returns.size(); ++t) {
        cumulative += ep.returns(t);
        idx.dates.push_back(ep.dates[static_cast<std::size_t>(t)]);
        idx.values.push_back(base_price * std::exp(cumulative));
    }
    return idx;
}

}  // namespace eigenmarket
