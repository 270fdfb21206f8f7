#include "doctest.h"

#include "eigenmarket/error.hpp"
#include "eigenmarket/ingest.hpp"
#include "eigenmarket/spectrum.hpp"
#include "eigenmarket/synth.hpp"
#include "oracle/checks.hpp"

#include <cmath>
#include <sstream>

using namespace eigenmarket;

namespace {

SyntheticSpec sized(std::size_t n, std::size_t t, std::uint64_t seed) {
    SyntheticSpec spec;
    spec.n = n;
    spec.t = t;
    spec.seed = seed;
    return spec;
}

double off_diagonal_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("rng moments") {
    Rng rng(1);
    const int m = 100000;
    double s1 = 0, s2 = 0, s4 = 0, u = 0;
    for (int i = 0; i < m; ++i) {
        const double x = rng.normal();
        s1 += x;
        s2 += x * x;
        s4 += x * x * x * x;
        const double v = rng.uniform();
        CHECK((v > 0.0 && v < 1.0));
        u += v;
    }
    CHECK(std::abs(s1 / m) < 0.02);
    CHECK(std::abs(s2 / m - 1.0) < 0.02);
    CHECK(std::abs(s4 / m - 3.0) < 0.15);
    CHECK(std::abs(u / m - 0.5) < 0.01);

    Rng g(2);
    double gm = 0;
    for (int i = 0; i < m; ++i) gm += g.gamma(2.5);
    CHECK(std::abs(gm / m - 2.5) < 0.05);

    Rng t(3);
    double tv = 0;
    for (int i = 0; i < m; ++i) {
        const double x = t.student_t(8.0);
        tv += x * x;
    }
    CHECK(std::abs(tv / m - 1.0) < 0.05);
}

TEST_CASE("rng is reproducible from its seed") {
    Rng a(99), b(99), c(100);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const double x = a.normal();
        CHECK(x == b.normal());
        differs |= x != c.normal();
    }
    CHECK(differs);
}

TEST_CASE("implied correlation examples") {
    SUBCASE("no structure gives the identity") {
        CHECK(implied_correlation(sized(5, 10, 0)).c == Eigen::MatrixXd::Identity(5, 5));
    }
    SUBCASE("single pair") {
        auto spec = sized(6, 10, 0);
        spec.pairs.push_back(PairSpec{InstrumentLabel{2}, InstrumentLabel{5}, 0.95});
        Eigen::MatrixXd want = Eigen::MatrixXd::Identity(6, 6);
        want(1, 4) = want(4, 1) = 0.95;
        CHECK(off_diagonal_error(implied_correlation(spec).c, want) < 1e-12);
    }
    SUBCASE("one factor at 0.3") {
        auto spec = sized(10, 20, 0);
        spec.market_beta = loading_for_correlation(0.3, spec.noise_sd);
        const double b2 = spec.market_beta * spec.market_beta;
        CHECK(b2 / (b2 + spec.noise_sd * spec.noise_sd) == doctest::Approx(0.3).epsilon(1e-14));
        Eigen::MatrixXd want = Eigen::MatrixXd::Constant(10, 10, 0.3);
        want.diagonal().setOnes();
        CHECK(off_diagonal_error(implied_correlation(spec).c, want) < 1e-10);
    }
    SUBCASE("pair on top of a market factor hits its target") {
        auto spec = sized(8, 20, 0);
        spec.market_beta = loading_for_correlation(0.3, spec.noise_sd);
        spec.pairs.push_back(PairSpec{InstrumentLabel{1}, InstrumentLabel{2}, 0.85});
        spec.pairs.push_back(PairSpec{InstrumentLabel{3}, InstrumentLabel{4}, -0.2});
        const auto c = implied_correlation(spec).c;
        CHECK(c(0, 1) == doctest::Approx(0.85).epsilon(1e-12));
        CHECK(c(2, 3) == doctest::Approx(-0.2).epsilon(1e-12));
        CHECK(c(4, 5) == doctest::Approx(0.3).epsilon(1e-12));
    }
}

TEST_CASE("infeasible specs are rejected") {
    auto bad = [](SyntheticSpec s) {
        try {
            implied_correlation(s);
        } catch (const Error& e) {
            return e.kind() == ErrorKind::Specification;
        }
        return false;
    };
    CHECK(bad(sized(1, 10, 0)));
    CHECK(bad(sized(10, 10, 0)));
    auto overlap = sized(6, 20, 0);
    overlap.sectors.push_back(SectorSpec{{InstrumentLabel{1}, InstrumentLabel{2}}, 0.01, {}});
    overlap.sectors.push_back(SectorSpec{{InstrumentLabel{2}, InstrumentLabel{3}}, 0.01, {}});
    CHECK(bad(overlap));
    auto out_of_range = sized(6, 20, 0);
    out_of_range.pairs.push_back(PairSpec{InstrumentLabel{1}, InstrumentLabel{7}, 0.5});
    CHECK(bad(out_of_range));
    auto shared = sized(6, 20, 0);
    shared.pairs.push_back(PairSpec{InstrumentLabel{1}, InstrumentLabel{2}, 0.5});
    shared.pairs.push_back(PairSpec{InstrumentLabel{2}, InstrumentLabel{3}, 0.5});
    CHECK(bad(shared));
    auto noiseless = sized(4, 20, 0);
    noiseless.noise_sd = 0.0;
    CHECK(bad(noiseless));
    auto signs = sized(6, 20, 0);
    signs.sectors.push_back(SectorSpec{{InstrumentLabel{1}, InstrumentLabel{2}}, 0.01, {1}});
    CHECK(bad(signs));
}

TEST_CASE("generation is deterministic and positive") {
    auto spec = sized(8, 300, 42);
    spec.market_beta = 0.005;
    const auto a = generate(spec);
    const auto b = generate(spec);
    CHECK(a.prices() == b.prices());
    CHECK(a.dates() == b.dates());
    CHECK(a.prices().minCoeff() > 0.0);
    CHECK(a.dates().size() == 301);
    CHECK(a.dates().front() == Date(2000, 1, 3));
    for (const auto& d : a.dates()) {
        CHECK(d.weekday() != 0);
        CHECK(d.weekday() != 6);
    }
    for (Eigen::Index i = 0; i < 8; ++i) CHECK(a.prices()(i, 0) == spec.base_price);
    spec.seed = 43;
    CHECK(generate(spec).prices() != a.prices());
}

TEST_CASE("csv output round-trips through ingest") {
    auto spec = sized(5, 50, 7);
    spec.market_beta = 0.004;
    const auto panel = generate(spec);
    std::ostringstream os;
    write_synthetic_csv(os, spec, panel);
    const std::string text = os.str();
    CHECK(text.rfind("# generator=mt19937_64+polar-normal seed=7 n=5 t=50\n", 0) == 0);
    std::istringstream in(text);
    const auto back = parse_panel(in, "synthetic");
    CHECK(back.prices() == panel.prices());
    CHECK(back.dates() == panel.dates());
}

TEST_CASE("spec JSON round-trip") {
    auto spec = sized(12, 500, 5);
    spec.market_beta = 0.003;
    spec.sectors.push_back(SectorSpec{{InstrumentLabel{1}, InstrumentLabel{2}, InstrumentLabel{3}}, 0.01, {1, -1, 1}});
    spec.pairs.push_back(PairSpec{InstrumentLabel{7}, InstrumentLabel{9}, 0.9});
    spec.noise = NoiseKind::StudentT;
    spec.student_df = 6;
    const auto back = spec_from_json(spec_to_json(spec));
    CHECK(spec_to_json(back) == spec_to_json(spec));
    CHECK(back.sectors[0].signs == std::vector<int>{1, -1, 1});
    CHECK(generate(back).prices() == generate(spec).prices());
    CHECK_THROWS_AS(spec_from_json(nlohmann::json{{"n", 3}, {"t", 10}, {"noise", "cauchy"}}), Error);
}

TEST_CASE("sample correlation converges to the implied matrix") {
    auto spec = sized(20, 5000, 2718);
    spec.market_beta = loading_for_correlation(0.2, spec.noise_sd);
    spec.sectors.push_back(SectorSpec{{InstrumentLabel{1}, InstrumentLabel{2}, InstrumentLabel{3}, InstrumentLabel{4}}, 0.01, {}});
    spec.pairs.push_back(PairSpec{InstrumentLabel{10}, InstrumentLabel{11}, 0.9});
    const auto sample = correlate(compute_returns(generate(spec)));
    CHECK(off_diagonal_error(sample.c, implied_correlation(spec).c) < 4.0 / std::sqrt(5000.0));
}

TEST_CASE("uniform one-factor panel has the closed-form top eigenvalue") {
    auto spec = sized(10, 100000, 314);
    spec.market_beta = loading_for_correlation(0.3, spec.noise_sd);
    const auto implied = implied_correlation(spec);
    CHECK(decompose(implied).value(1) == doctest::Approx(3.7).epsilon(1e-10));
    const auto sd = decompose(correlate(compute_returns(generate(spec))));
    CHECK(std::abs(sd.value(1) - 3.7) < 0.05);
}

TEST_CASE("pure noise spectrum lies near the bounds") {
    const auto spec = sized(40, 4000, 55);
    const auto sd = decompose(correlate(compute_returns(generate(spec))));
    const auto law = mp_law(spec.n, spec.t);
    CHECK(sd.eigenvalues.maxCoeff() < law.lambda_max + 0.08);
    CHECK(sd.eigenvalues.minCoeff() > law.lambda_min - 0.08);
}
