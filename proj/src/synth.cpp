#include "eigenmarket/synth.hpp"

#include "eigenmarket/error.hpp"
#include "eigenmarket/spectrum.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <ostream>
#include <set>

namespace eigenmarket {

namespace {

constexpr const char* kModule = "synth";

[[noreturn]] void infeasible(const std::string& message) { throw Error(ErrorKind::Specification, kModule, message); }

void check_label(InstrumentLabel label, std::size_t n, const std::string& context) {
    if (label.value < 1 || label.value > n) {
        infeasible(context + " refers to label " + label.str() + ", outside 1.." + std::to_string(n));
    }
}

}  // namespace

double Rng::uniform() {
    // 53 random bits, offset by half a step so 0 and 1 are never returned.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u = 0.0, v = 0.0, s = 0.0;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
}

double Rng::gamma(double shape) {
    // Marsaglia-Tsang squeeze; shapes below 1 are boosted and corrected.
    if (shape < 1.0) return gamma(shape + 1.0) * std::pow(uniform(), 1.0 / shape);
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = 0.0, v = 0.0;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double Rng::student_t(double df) {
    const double z = normal();
    const double chi2 = 2.0 * gamma(0.5 * df);
    return z / std::sqrt(chi2 / df) * std::sqrt((df - 2.0) / df);
}

Eigen::MatrixXd FactorModel::covariance() const {
    const auto n = loadings.rows();
    return loadings * loadings.transpose() + noise_sd * noise_sd * Eigen::MatrixXd::Identity(n, n);
}

double loading_for_correlation(double rho, double noise_sd) {
    if (!(rho >= 0.0 && rho < 1.0)) infeasible("single-factor correlation must lie in [0, 1)");
    return noise_sd * std::sqrt(rho / (1.0 - rho));
}

FactorModel factor_model(const SyntheticSpec& spec) {
    const std::size_t n = spec.n;
    if (n < 2) infeasible("need n >= 2 instruments");
    if (spec.t <= n) infeasible("need t > n (t=" + std::to_string(spec.t) + ", n=" + std::to_string(n) + ")");
    if (!(spec.noise_sd >= 0.0) || !std::isfinite(spec.noise_sd)) infeasible("noise_sd must be finite and >= 0");
    if (!(spec.base_price > 0.0) || !std::isfinite(spec.base_price)) infeasible("base_price must be positive");
    if (!std::isfinite(spec.market_beta)) infeasible("market_beta must be finite");
    if (spec.noise == NoiseKind::StudentT && !(spec.student_df > 2.0)) {
        infeasible("Student-t noise needs df > 2 for a finite variance");
    }

    std::set<InstrumentLabel> in_sector;
    for (std::size_t s = 0; s < spec.sectors.size(); ++s) {
        const auto& sector = spec.sectors[s];
        if (sector.members.empty()) infeasible("sector " + std::to_string(s + 1) + " has no members");
        if (!std::isfinite(sector.loading)) infeasible("sector " + std::to_string(s + 1) + " loading must be finite");
        if (!sector.signs.empty() && sector.signs.size() != sector.members.size()) {
            infeasible("sector " + std::to_string(s + 1) + " needs one sign per member");
        }
        for (int sg : sector.signs) {
            if (sg != 1 && sg != -1) infeasible("sector " + std::to_string(s + 1) + " signs must be +1 or -1");
        }
        for (const auto& m : sector.members) {
            check_label(m, n, "sector " + std::to_string(s + 1));
            if (!in_sector.insert(m).second) infeasible("label " + m.str() + " appears in more than one sector");
        }
    }
    std::set<InstrumentLabel> in_pair;
    for (std::size_t p = 0; p < spec.pairs.size(); ++p) {
        const auto& pair = spec.pairs[p];
        const std::string ctx = "pair " + std::to_string(p + 1);
        check_label(pair.a, n, ctx);
        check_label(pair.b, n, ctx);
        if (pair.a == pair.b) infeasible(ctx + " couples a label with itself");
        if (!(pair.correlation > -1.0 && pair.correlation < 1.0)) infeasible(ctx + " correlation must lie in (-1, 1)");
        if (!in_pair.insert(pair.a).second || !in_pair.insert(pair.b).second) {
            infeasible(ctx + " shares an instrument with another pair");
        }
    }

    const auto ni = static_cast<Eigen::Index>(n);
    const Eigen::Index factors = (spec.market_beta != 0.0 ? 1 : 0) + static_cast<Eigen::Index>(spec.sectors.size()) +
                                 static_cast<Eigen::Index>(spec.pairs.size());
    FactorModel fm{Eigen::MatrixXd::Zero(ni, factors), spec.noise_sd};
    Eigen::Index col = 0;
    if (spec.market_beta != 0.0) fm.loadings.col(col++).setConstant(spec.market_beta);
    for (const auto& sector : spec.sectors) {
        for (std::size_t k = 0; k < sector.members.size(); ++k) {
            const double sign = sector.signs.empty() ? 1.0 : sector.signs[k];
            fm.loadings(sector.members[k].value - 1, col) = sign * sector.loading;
        }
        ++col;
    }
    const double noise_var = spec.noise_sd * spec.noise_sd;
    for (const auto& pair : spec.pairs) {
        // Pairs are disjoint, so the rows of a and b still hold only market
        // and sector loadings here.
        const auto a = static_cast<Eigen::Index>(pair.a.value - 1);
        const auto b = static_cast<Eigen::Index>(pair.b.value - 1);
        const double va = fm.loadings.row(a).squaredNorm() + noise_var;
        const double vb = fm.loadings.row(b).squaredNorm() + noise_var;
        if (!(va > 0.0 && vb > 0.0)) infeasible("pair (" + pair.a.str() + ", " + pair.b.str() + ") has a zero-variance member");
        const double rho0 = fm.loadings.row(a).dot(fm.loadings.row(b)) / std::sqrt(va * vb);
        // corr = (rho0 + s g^2) / (1 + g^2) after adding loadings g sqrt(va), s g sqrt(vb).
        const double s = pair.correlation >= rho0 ? 1.0 : -1.0;
        const double g2 = (pair.correlation - rho0) / (s - pair.correlation);
        const double g = std::sqrt(std::max(0.0, g2));
        fm.loadings(a, col) = g * std::sqrt(va);
        fm.loadings(b, col) = s * g * std::sqrt(vb);
        ++col;
    }

    const Eigen::VectorXd variance = fm.covariance().diagonal();
    for (Eigen::Index i = 0; i < ni; ++i) {
        if (!(variance(i) > 0.0)) infeasible("instrument " + std::to_string(i + 1) + " has zero variance");
    }
    return fm;
}

CorrelationMatrix implied_correlation(const SyntheticSpec& spec) {
    const FactorModel fm = factor_model(spec);
    const Eigen::MatrixXd cov = fm.covariance();
    const Eigen::VectorXd inv_sd = cov.diagonal().cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd c = inv_sd.asDiagonal() * cov * inv_sd.asDiagonal();
    c = 0.5 * (c + c.transpose()).eval();
    c.diagonal().setOnes();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success || solver.eigenvalues().minCoeff() < -1e-10) {
        infeasible("implied correlation matrix is not positive semidefinite");
    }

    CorrelationMatrix cm;
    cm.c = std::move(c);
    for (std::size_t i = 0; i < spec.n; ++i) {
        InstrumentMeta m;
        m.label = InstrumentLabel{static_cast<std::uint32_t>(i + 1)};
        m.name = m.label.str();
        m.listing_date = spec.start_date;
        cm.instruments.push_back(std::move(m));
    }
    return cm;
}

PricePanel generate(const SyntheticSpec& spec) {
    const FactorModel fm = factor_model(spec);
    (void)implied_correlation(spec);  // PSD gate

    const auto n = static_cast<Eigen::Index>(spec.n);
    const auto t = static_cast<Eigen::Index>(spec.t);
    const Eigen::Index k = fm.loadings.cols();

    std::vector<Date> dates;
    dates.reserve(spec.t + 1);
    Date d = spec.start_date;
    while (d.weekday() == 0 || d.weekday() == 6) d = d.next_day();
    dates.push_back(d);
    while (dates.size() < spec.t + 1) {
        d = d.next_day();
        while (d.weekday() == 0 || d.weekday() == 6) d = d.next_day();
        dates.push_back(d);
    }

    Rng rng(spec.seed);
    RowMatrix prices(n, t + 1);
    Eigen::VectorXd log_price = Eigen::VectorXd::Constant(n, std::log(spec.base_price));
    prices.col(0) = Eigen::VectorXd::Constant(n, spec.base_price);
    Eigen::VectorXd f(k);
    Eigen::VectorXd noise(n);
    for (Eigen::Index s = 1; s <= t; ++s) {
        for (Eigen::Index j = 0; j < k; ++j) f(j) = rng.normal();
        for (Eigen::Index i = 0; i < n; ++i) {
            noise(i) = spec.noise == NoiseKind::StudentT ? rng.student_t(spec.student_df) : rng.normal();
        }
        log_price += fm.loadings * f + fm.noise_sd * noise;
        prices.col(s) = log_price.array().exp();
    }

    std::vector<InstrumentMeta> instruments;
    for (Eigen::Index i = 0; i < n; ++i) {
        InstrumentMeta m;
        m.label = InstrumentLabel{static_cast<std::uint32_t>(i + 1)};
        m.name = m.label.str();
        m.listing_date = dates.front();
        instruments.push_back(std::move(m));
    }
    std::vector<FillFlag> flags(spec.n * (spec.t + 1), FillFlag::Observed);
    return PricePanel(std::move(instruments), std::move(dates), std::move(prices), std::move(flags));
}

void write_synthetic_csv(std::ostream& out, const SyntheticSpec& spec, const PricePanel& panel) {
    out << "# generator=" << Rng::kAlgorithm << " seed=" << spec.seed << " n=" << spec.n << " t=" << spec.t << '\n';
    write_panel_csv(out, panel, NumberFormat{true});
}

SyntheticSpec spec_from_json(const nlohmann::json& j) {
    try {
        SyntheticSpec s;
        s.n = j.at("n").get<std::size_t>();
        s.t = j.at("t").get<std::size_t>();
        s.seed = j.value("seed", std::uint64_t{0});
        s.market_beta = j.value("market_beta", 0.0);
        s.noise_sd = j.value("noise_sd", s.noise_sd);
        s.base_price = j.value("base_price", s.base_price);
        if (j.contains("start_date")) s.start_date = Date::parse(j.at("start_date").get<std::string>());
        const std::string noise = j.value("noise", std::string("gaussian"));
        if (noise == "gaussian") {
            s.noise = NoiseKind::Gaussian;
        } else if (noise == "student_t") {
            s.noise = NoiseKind::StudentT;
        } else {
            throw Error(ErrorKind::Parse, kModule, "unknown noise kind '" + noise + "'");
        }
        s.student_df = j.value("df", s.student_df);
        for (const auto& js : j.value("sectors", nlohmann::json::array())) {
            SectorSpec sec;
            for (const auto& m : js.at("members")) sec.members.push_back(InstrumentLabel{m.get<std::uint32_t>()});
            sec.loading = js.at("loading").get<double>();
            if (js.contains("signs")) sec.signs = js.at("signs").get<std::vector<int>>();
            s.sectors.push_back(std::move(sec));
        }
        for (const auto& jp : j.value("pairs", nlohmann::json::array())) {
            s.pairs.push_back(PairSpec{InstrumentLabel{jp.at("a").get<std::uint32_t>()},
                                       InstrumentLabel{jp.at("b").get<std::uint32_t>()},
                                       jp.at("correlation").get<double>()});
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Parse, kModule, std::string("synthetic spec: ") + e.what());
    }
}

nlohmann::json spec_to_json(const SyntheticSpec& s) {
    nlohmann::json j;
    j["n"] = s.n;
    j["t"] = s.t;
    j["seed"] = s.seed;
    j["market_beta"] = s.market_beta;
    j["noise_sd"] = s.noise_sd;
    j["base_price"] = s.base_price;
    j["start_date"] = s.start_date.iso();
    j["noise"] = s.noise == NoiseKind::StudentT ? "student_t" : "gaussian";
    j["df"] = s.student_df;
    j["sectors"] = nlohmann::json::array();
    for (const auto& sec : s.sectors) {
        nlohmann::json js;
        js["members"] = nlohmann::json::array();
        for (const auto& m : sec.members) js["members"].push_back(m.value);
        js["loading"] = sec.loading;
        if (!sec.signs.empty()) js["signs"] = sec.signs;
        j["sectors"].push_back(js);
    }
    j["pairs"] = nlohmann::json::array();
    for (const auto& p : s.pairs) j["pairs"].push_back({{"a", p.a.value}, {"b", p.b.value}, {"correlation", p.correlation}});
    return j;
}

}  // namespace eigenmarket
