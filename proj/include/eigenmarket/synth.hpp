/**
 * @file synth.hpp
 * @brief Seeded factor-model price panels with planted correlation structure.
 *
 * Returns follow
 *
 *     r_i(t) = b_m F(t) + sum_s b_s S_s(t) [i in s] + pair terms + noise_sd e_i(t)
 *
 * with independent unit-variance factors. A planted pair (a, b, rho) adds one
 * shared factor whose loadings are solved so that corr(r_a, r_b) equals rho
 * exactly given the rest of the structure. The population correlation matrix
 * is therefore known in closed form (`implied_correlation`).
 */
#pragma once

#include "eigenmarket/corrcore.hpp"
#include "eigenmarket/ingest.hpp"

#include "json.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace eigenmarket {

/// mt19937_64 with hand-written uniform/normal/gamma transforms, so a seed
/// produces the same stream on every standard library.
class Rng {
public:
    static constexpr const char* kAlgorithm = "mt19937_64+polar-normal";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform();  ///< (0, 1)
    double normal();
    double gamma(double shape);
    double student_t(double df);  ///< scaled to unit variance, df > 2

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

struct SectorSpec {
    std::vector<InstrumentLabel> members;
    double loading = 0.0;
    /// Optional per-member sign (+1 or -1); empty means all positive.
    std::vector<int> signs;
};

struct PairSpec {
    InstrumentLabel a;
    InstrumentLabel b;
    double correlation = 0.0;
};

enum class NoiseKind { Gaussian, StudentT };

/// Instruments are labelled 1..n. `t` counts returns; the panel has t + 1 prices.
struct SyntheticSpec {
    std::size_t n = 0;
    std::size_t t = 0;
    std::uint64_t seed = 0;
    double market_beta = 0.0;
    std::vector<SectorSpec> sectors;
    std::vector<PairSpec> pairs;
    double noise_sd = 0.01;
    double base_price = 100.0;
    NoiseKind noise = NoiseKind::Gaussian;
    double student_df = 5.0;
    Date start_date{2000, 1, 3};
};

/// Loading matrix over [market, sectors..., pairs...] and the noise scale.
struct FactorModel {
    Eigen::MatrixXd loadings;  ///< n x factors
    double noise_sd = 0.0;

    Eigen::MatrixXd covariance() const;
};

/// Validates the spec and solves the pair loadings. Throws Error{Specification}.
FactorModel factor_model(const SyntheticSpec& spec);

CorrelationMatrix implied_correlation(const SyntheticSpec& spec);

/// Prices start at base_price on start_date and advance one business day per return.
PricePanel generate(const SyntheticSpec& spec);

/// Loader-format CSV preceded by a `#` line naming the generator and seed.
/// Prices are written at round-trip precision.
void write_synthetic_csv(std::ostream& out, const SyntheticSpec& spec, const PricePanel& panel);

SyntheticSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const SyntheticSpec& spec);

/// Factor loading giving a constant pairwise correlation rho under a single
/// factor: rho = b^2 / (b^2 + sd^2).
double loading_for_correlation(double rho, double noise_sd);

}  // namespace eigenmarket
