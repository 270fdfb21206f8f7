#include "doctest.h"

#include "eigenmarket/error.hpp"
#include "eigenmarket/spectrum.hpp"
#include "eigenmarket/synth.hpp"
#include "oracle/checks.hpp"
#include "oracle/jacobi.hpp"
#include "oracle/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

using namespace eigenmarket;

namespace {

Eigen::MatrixXd uniform_correlation(int n, double rho) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Constant(n, n, rho);
    c.diagonal().setOnes();
    return c;
}

Eigen::MatrixXd random_correlation(std::mt19937_64& rng, int n, int t) {
    std::normal_distribution<double> nd;
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(t)));
    for (int j = 0; j < t; ++j) {
        const double f = nd(rng);
        for (int i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 0.5 * f * (i % 3) + nd(rng);
    }
    return correlate(oracle::return_panel(rows)).c;
}

}  // namespace

TEST_CASE("decompose analytic examples") {
    SUBCASE("identity") {
        const auto sd = decompose(Eigen::MatrixXd::Identity(5, 5));
        for (int k = 1; k <= 5; ++k) CHECK(sd.value(k) == doctest::Approx(1.0));
        CHECK(oracle::spectral_invariants_hold(sd, Eigen::MatrixXd::Identity(5, 5)));
    }
    SUBCASE("two by two") {
        Eigen::MatrixXd c(2, 2);
        c << 1, 0.5, 0.5, 1;
        const auto sd = decompose(c);
        CHECK(sd.value(1) == doctest::Approx(1.5));
        CHECK(sd.value(2) == doctest::Approx(0.5));
        CHECK(sd.vector(1)(0) == doctest::Approx(1.0 / std::sqrt(2.0)));
        CHECK(sd.vector(1)(1) == doctest::Approx(1.0 / std::sqrt(2.0)));
    }
    SUBCASE("uniform correlation agrees with the closed form and a Jacobi solver") {
        const auto c = uniform_correlation(10, 0.3);
        const auto sd = decompose(c);
        std::vector<std::vector<double>> a(10, std::vector<double>(10));
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 10; ++j) a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = c(i, j);
        const auto jac = oracle::jacobi_eigenvalues(a);
        CHECK(sd.value(1) == doctest::Approx(3.7).epsilon(1e-12));
        CHECK(jac[0] == doctest::Approx(3.7).epsilon(1e-12));
        for (int k = 2; k <= 10; ++k) {
            CHECK(sd.value(k) == doctest::Approx(0.7).epsilon(1e-12));
            CHECK(std::abs(sd.value(k) - jac[static_cast<std::size_t>(k - 1)]) < 1e-10);
        }
        CHECK(oracle::spectral_invariants_hold(sd, c));
    }
}

TEST_CASE("decompose matches the Jacobi oracle on random matrices") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 4 + trial;
        const auto c = random_correlation(rng, n, 30 + 5 * trial);
        const auto sd = decompose(c);
        std::vector<std::vector<double>> a(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = c(i, j);
        const auto jac = oracle::jacobi_eigenvalues(a);
        for (int k = 0; k < n; ++k) CHECK(std::abs(sd.eigenvalues(k) - jac[static_cast<std::size_t>(k)]) < 1e-10);
        std::string why;
        CHECK_MESSAGE(oracle::spectral_invariants_hold(sd, c, &why), why);
        for (int k = 1; k < n; ++k) CHECK(sd.eigenvalues(k - 1) >= sd.eigenvalues(k));
        for (int k = 1; k <= n; ++k) CHECK(sd.vector(k).sum() >= -1e-12 * std::sqrt(n));
    }
}

TEST_CASE("decompose is deterministic and permutation-covariant") {
    std::mt19937_64 rng(9);
    const int n = 12;
    const auto c = random_correlation(rng, n, 80);
    const auto a = decompose(c);
    const auto b = decompose(c);
    CHECK(a.eigenvalues == b.eigenvalues);
    CHECK(a.eigenvectors == b.eigenvectors);

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXd pc(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) pc(i, j) = c(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    const auto p = decompose(pc);
    CHECK((p.eigenvalues - a.eigenvalues).cwiseAbs().maxCoeff() < 1e-10);
    for (int k = 1; k <= n; ++k) {
        // eigenvalues here are simple, so vectors match up to the permutation
        const Eigen::VectorXd u = a.vector(k), v = p.vector(k);
        double err = 0;
        for (int i = 0; i < n; ++i) err = std::max(err, std::abs(v(i) - u(perm[static_cast<std::size_t>(i)])));
        CHECK(err < 1e-8);
    }
}

TEST_CASE("orient breaks sign ties on the largest component") {
    Eigen::VectorXd v(4);
    v << 0.5, -0.5, -0.5, 0.5;  // sums to zero, first largest is positive already
    orient(v);
    CHECK(v(0) == 0.5);
    Eigen::VectorXd w(3);
    w << 0.3, -0.6, 0.3;
    orient(w);
    CHECK(w(1) == 0.6);
    Eigen::VectorXd x(2);
    x << -0.8, 0.1;
    orient(x);
    CHECK(x(0) == 0.8);
}

TEST_CASE("Marchenko-Pastur bounds") {
    const auto law = mp_law(74, 5473);
    CHECK(law.q == doctest::Approx(73.959).epsilon(1e-5));
    CHECK(std::round(law.lambda_min * 1000) / 1000 == 0.781);
    CHECK(std::round(law.lambda_max * 1000) / 1000 == 1.246);
    CHECK(law.lambda_min == doctest::Approx(0.7809619315131169).epsilon(1e-14));
    CHECK(law.lambda_max == doctest::Approx(1.2460799102555655).epsilon(1e-14));

    const auto q4 = mp_law(100, 400);
    CHECK(q4.lambda_min == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(q4.lambda_max == doctest::Approx(2.25).epsilon(1e-14));

    CHECK_THROWS_AS(mp_law(10, 10), Error);
    CHECK_THROWS_AS(mp_law(10, 5), Error);
    CHECK_THROWS_AS(mp_law_for_ratio(1.0), Error);

    for (double q : {1.5, 2.0, 7.3, 73.959, 1000.0}) {
        const auto l = mp_law_for_ratio(q);
        CHECK(l.lambda_max - l.lambda_min == doctest::Approx(4.0 / std::sqrt(q)).epsilon(1e-12));
        CHECK(l.lambda_min >= 0.0);
    }
}

TEST_CASE("Marchenko-Pastur density") {
    const auto law = mp_law_for_ratio(73.959);
    CHECK(law.density(law.lambda_min) == 0.0);
    CHECK(law.density(law.lambda_max) == 0.0);
    CHECK(law.density(0.5) == 0.0);
    CHECK(law.density(2.0) == 0.0);
    CHECK(law.density(-1.0) == 0.0);
    CHECK(law.density(law.lambda_min + 1e-12) < 1e-3);
    CHECK(law.density(law.lambda_max - 1e-12) < 1e-3);
    for (double q : {2.0, 10.0, 73.959, 500.0}) {
        const auto l = mp_law_for_ratio(q);
        const double integral =
            oracle::adaptive_simpson([&](double x) { return l.density(x); }, l.lambda_min, l.lambda_max);
        CHECK(std::abs(integral - 1.0) < 1e-6);
        for (int s = 0; s <= 100; ++s) CHECK(l.density(l.lambda_min - 0.1 + s * (l.lambda_max - l.lambda_min + 0.2) / 100) >= 0.0);
    }
}

TEST_CASE("empirical density") {
    const auto id = decompose(Eigen::MatrixXd::Identity(6, 6));
    const auto h = empirical_density(id, 10);
    CHECK(h.integral() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::count_if(h.counts.begin(), h.counts.end(), [](std::size_t c) { return c > 0; }) == 1);
    CHECK_THROWS_AS(empirical_density(id, 0), Error);

    std::mt19937_64 rng(4);
    const auto sd = decompose(random_correlation(rng, 15, 60));
    CHECK(empirical_density(sd, 25).integral() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(empirical_density(sd, 7, std::pair{0.0, 10.0}).integral() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("classify deviations") {
    const auto flat = decompose(Eigen::MatrixXd::Identity(4, 4));
    const auto d0 = classify_deviations(flat, mp_law_for_ratio(10.0));
    CHECK(d0.below.empty());
    CHECK(d0.above.empty());
    CHECK(d0.bulk.size() == 4);

    const auto law = mp_law_for_ratio(100.0);
    CHECK(law.lambda_max == doctest::Approx(1.21));
    const auto d = classify_deviations(decompose(uniform_correlation(10, 0.3)), law);
    CHECK(d.above == std::vector<int>{1});
    CHECK(d.below.size() == 9);  // 0.7 < 0.81
    CHECK(d.class_of(1) == SpectralClass::Above);
    CHECK(d.class_of(2) == SpectralClass::Below);

    SUBCASE("three planted sectors") {
        SyntheticSpec spec;
        spec.n = 30;
        spec.t = 3000;
        spec.seed = 5;
        spec.market_beta = loading_for_correlation(0.2, spec.noise_sd);
        for (int s = 0; s < 3; ++s) {
            SectorSpec sec;
            for (int i = 0; i < 6; ++i) sec.members.push_back(InstrumentLabel{static_cast<std::uint32_t>(1 + 8 * s + i)});
            sec.loading = 0.01;
            spec.sectors.push_back(sec);
        }
        const auto sd = decompose(correlate(compute_returns(generate(spec))));
        const auto dev = classify_deviations(sd, mp_law(spec.n, spec.t));
        CHECK(dev.above.size() >= 3);
        CHECK(dev.above.size() + dev.bulk.size() + dev.below.size() == 30);
    }
}

TEST_CASE("pure noise stays near the bounds") {
    SyntheticSpec spec;
    spec.n = 74;
    spec.t = 5473;
    spec.seed = 2024;
    const auto sd = decompose(correlate(compute_returns(generate(spec))));
    CHECK(sd.eigenvalues.maxCoeff() <= 1.33);
    CHECK(sd.eigenvalues.minCoeff() >= 0.70);
    const auto dev = classify_deviations(sd, mp_law(spec.n, spec.t));
    CHECK(static_cast<double>(dev.above.size() + dev.below.size()) / 74.0 < 0.03);
}

TEST_CASE("eigenvalue CSV layout") {
    Eigen::MatrixXd c(2, 2);
    c << 1, 0.5, 0.5, 1;
    const auto sd = decompose(c);
    std::ostringstream os;
    write_eigenvalues_csv(os, sd, classify_deviations(sd, mp_law_for_ratio(100.0)), NumberFormat{});
    CHECK(os.str() == "rank,lambda,class\n1,1.5,above\n2,0.5,below\n");
}
