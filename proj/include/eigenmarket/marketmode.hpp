/**
 * @file marketmode.hpp
 * @brief Market-mode removal by single-factor regression, and the sector and
 *        pair reports built from the residual spectrum.
 */
#pragma once

#include "eigenmarket/corrcore.hpp"
#include "eigenmarket/returns.hpp"
#include "eigenmarket/spectrum.hpp"

#include <Eigen/Core>

#include <map>
#include <string>
#include <vector>

namespace eigenmarket {

struct MarketModeRemoval {
    Eigen::VectorXd market_factor;   ///< M(t)
    Eigen::VectorXd alphas;          ///< per instrument, all N
    Eigen::VectorXd betas;
    RowMatrix residuals;             ///< N x T', epsilon_i(t)
    std::vector<std::size_t> included;         ///< rows entering the residual matrix
    std::vector<InstrumentMeta> excluded;      ///< perfect fits, zero residual variance
    std::size_t observations = 0;
    CorrelationMatrix residual_corr;
    SpectralDecomposition residual_spectrum;
};

/// Fits r_i(t) = alpha_i + beta_i M(t) + eps_i(t) for every instrument, then
/// standardizes, correlates and decomposes the residuals.
/// Throws Error{Parameter} for a length mismatch or a constant market series.
MarketModeRemoval remove_market_mode(const ReturnPanel& rp, const Eigen::VectorXd& market);

inline constexpr double kDefaultThresholdFactor = 1.5;

struct Participant {
    InstrumentMeta instrument;
    std::size_t index = 0;   ///< position in the decomposition
    double component = 0.0;
    int sign = 1;
};

/// Components with |u^k_l| >= factor / sqrt(N), largest magnitude first.
std::vector<Participant> significant_participants(const SpectralDecomposition& sd, int rank,
                                                  double threshold_factor = kDefaultThresholdFactor);

struct SectorBlock {
    int sign = 1;
    std::vector<Participant> participants;
    std::map<std::string, std::size_t> by_exchange;
    std::map<std::string, std::size_t> by_country;
    std::map<std::string, std::size_t> by_commodity;
};

struct SectorEntry {
    int rank = 0;
    double eigenvalue = 0.0;
    bool above_bulk = false;
    std::vector<Participant> participants;
    SectorBlock positive;
    SectorBlock negative;
};

struct SectorReport {
    double threshold_factor = kDefaultThresholdFactor;
    MarchenkoPasturLaw law;
    std::vector<SectorEntry> entries;
    std::vector<std::string> warnings;
};

/// Ranks refer to the residual spectrum. Ranks inside the bulk are still
/// reported, with a warning. `meta` overrides annotations by label.
SectorReport sector_report(const MarketModeRemoval& mr, const std::vector<InstrumentMeta>& meta,
                           const std::vector<int>& ranks, double threshold_factor = kDefaultThresholdFactor);

/// `eigenvector,sign,label,name,exchange,country,component`
void write_sectors_csv(std::ostream& out, const SectorReport& report, const NumberFormat& fmt);

/// Top-2 share of u^k below this marks a vector without a dominant pair.
inline constexpr double kDominantPairShare = 0.5;

struct PairEntry {
    int rank = 0;
    double eigenvalue = 0.0;
    InstrumentMeta a;
    InstrumentMeta b;
    double component_a = 0.0;
    double component_b = 0.0;
    int sign_a = 1;
    int sign_b = 1;
    double c_ij = 0.0;               ///< from the original matrix
    std::size_t correlation_rank = 0;///< 1 = largest off-diagonal coefficient of the original matrix
    double top2_share = 0.0;         ///< (u_a)^2 + (u_b)^2
    bool dominant = false;
    /// Eigenvalue is zero to round-off. Removing M = G^1 makes the residuals
    /// linearly dependent, so one such direction always exists.
    bool null_mode = false;
};

struct PairReport {
    std::vector<PairEntry> entries;  ///< smallest eigenvalue first
};

PairReport pair_report(const MarketModeRemoval& mr, const CorrelationMatrix& original, std::size_t count);

/// `eigenvector_rank,label_a,label_b,sign_a,sign_b,c_ij`
void write_pairs_csv(std::ostream& out, const PairReport& report, const NumberFormat& fmt);

}  // namespace eigenmarket
