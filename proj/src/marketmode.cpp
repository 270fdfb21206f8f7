#include "eigenmarket/marketmode.hpp"

#include "csv.hpp"
#include "eigenmarket/error.hpp"
#include "eigenmarket/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace eigenmarket {

namespace {

constexpr const char* kModule = "marketmode";

// Residual variance below this fraction of the return variance counts as a perfect fit.
constexpr double kPerfectFit = 1e-20;

// Eigenvalues this close to zero belong to the exact null space of the residuals.
constexpr double kNullEigenvalue = 1e-9;

int sign_of(double v) { return v < 0.0 ? -1 : 1; }

void tally(SectorBlock& block) {
    for (const auto& p : block.participants) {
        ++block.by_exchange[p.instrument.exchange];
        ++block.by_country[p.instrument.country];
        ++block.by_commodity[p.instrument.commodity];
    }
}

}  // namespace

MarketModeRemoval remove_market_mode(const ReturnPanel& rp, const Eigen::VectorXd& market) {
    const std::size_t n = rp.instrument_count();
    const std::size_t t = rp.observation_count();
    if (static_cast<std::size_t>(market.size()) != t) {
        throw Error(ErrorKind::Parameter, kModule,
                    "market series has " + std::to_string(market.size()) + " points, returns have " + std::to_string(t));
    }
    if (t < 3) throw Error(ErrorKind::Parameter, kModule, "market regression needs at least 3 observations");
    if (market.minCoeff() == market.maxCoeff()) {
        throw Error(ErrorKind::Parameter, kModule, "market factor has zero variance");
    }

    MarketModeRemoval mr;
    mr.market_factor = market;
    mr.observations = t;
    mr.alphas.resize(static_cast<Eigen::Index>(n));
    mr.betas.resize(static_cast<Eigen::Index>(n));
    mr.residuals.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t));

    const double tt = static_cast<double>(t);
    const double m_mean = market.mean();
    const Eigen::VectorXd m_centered = market.array() - m_mean;
    const double m_var = m_centered.squaredNorm() / tt;

    std::vector<char> perfect(n, 0);
    parallel_for(n, [&](std::size_t ui) {
        const auto i = static_cast<Eigen::Index>(ui);
        const auto r = rp.returns.row(i);
        const double r_mean = r.mean();
        const Eigen::RowVectorXd r_centered = r.array() - r_mean;
        const double beta = r_centered.dot(m_centered.transpose()) / tt / m_var;
        const double alpha = r_mean - beta * m_mean;
        auto eps = mr.residuals.row(i);
        eps = r_centered - beta * m_centered.transpose();
        eps.array() -= eps.mean();
        mr.alphas(i) = alpha;
        mr.betas(i) = beta;
        const double r_var = r_centered.squaredNorm() / tt;
        const double e_var = eps.squaredNorm() / tt;
        perfect[ui] = (r_var == 0.0 || e_var <= kPerfectFit * r_var) ? 1 : 0;
    });

    for (std::size_t i = 0; i < n; ++i) {
        if (perfect[i]) {
            mr.excluded.push_back(rp.instruments[i]);
        } else {
            mr.included.push_back(i);
        }
    }
    if (mr.included.empty()) {
        throw Error(ErrorKind::Domain, kModule, "every instrument is fitted exactly by the market factor");
    }

    std::vector<InstrumentMeta> kept;
    RowMatrix rows(static_cast<Eigen::Index>(mr.included.size()), static_cast<Eigen::Index>(t));
    for (std::size_t k = 0; k < mr.included.size(); ++k) {
        kept.push_back(rp.instruments[mr.included[k]]);
        rows.row(static_cast<Eigen::Index>(k)) = mr.residuals.row(static_cast<Eigen::Index>(mr.included[k]));
    }
    mr.residual_corr = correlation_matrix(standardize(kept, rows));
    mr.residual_spectrum = decompose(mr.residual_corr);
    return mr;
}

std::vector<Participant> significant_participants(const SpectralDecomposition& sd, int rank, double threshold_factor) {
    if (!(threshold_factor > 0.0)) throw Error(ErrorKind::Parameter, kModule, "threshold factor must be positive");
    const Eigen::VectorXd u = sd.vector(rank);
    const double cut = threshold_factor / std::sqrt(static_cast<double>(u.size()));

    std::vector<Participant> out;
    for (Eigen::Index l = 0; l < u.size(); ++l) {
        if (std::abs(u(l)) >= cut) {
            Participant p;
            p.index = static_cast<std::size_t>(l);
            if (!sd.instruments.empty()) p.instrument = sd.instruments[p.index];
            p.component = u(l);
            p.sign = sign_of(u(l));
            out.push_back(std::move(p));
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const Participant& a, const Participant& b) {
        return std::abs(a.component) > std::abs(b.component);
    });
    return out;
}

SectorReport sector_report(const MarketModeRemoval& mr, const std::vector<InstrumentMeta>& meta,
                           const std::vector<int>& ranks, double threshold_factor) {
    const auto& sd = mr.residual_spectrum;
    SectorReport rep;
    rep.threshold_factor = threshold_factor;
    bool have_law = true;
    try {
        rep.law = mp_law(sd.size(), mr.observations);
    } catch (const Error&) {
        have_law = false;
        rep.warnings.push_back("Marchenko-Pastur bounds undefined for N=" + std::to_string(sd.size()) +
                               ", T=" + std::to_string(mr.observations) + "; ranks not screened");
    }

    for (int rank : ranks) {
        SectorEntry e;
        e.rank = rank;
        e.eigenvalue = sd.value(rank);
        e.above_bulk = have_law && e.eigenvalue > rep.law.lambda_max;
        if (have_law && !e.above_bulk) {
            rep.warnings.push_back("rank " + std::to_string(rank) + " (lambda=" + format_significant(e.eigenvalue) +
                                   ") is not above lambda_max=" + format_significant(rep.law.lambda_max));
        }
        e.participants = significant_participants(sd, rank, threshold_factor);
        for (auto& p : e.participants) {
            auto it = std::find_if(meta.begin(), meta.end(),
                                   [&](const InstrumentMeta& m) { return m.label == p.instrument.label; });
            if (it != meta.end()) p.instrument = *it;
        }
        e.positive.sign = 1;
        e.negative.sign = -1;
        for (const auto& p : e.participants) (p.sign > 0 ? e.positive : e.negative).participants.push_back(p);
        tally(e.positive);
        tally(e.negative);
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

void write_sectors_csv(std::ostream& out, const SectorReport& report, const NumberFormat& fmt) {
    out << "eigenvector,sign,label,name,exchange,country,component\n";
    for (const auto& e : report.entries) {
        for (const auto* block : {&e.positive, &e.negative}) {
            for (const auto& p : block->participants) {
                const auto& m = p.instrument;
                out << e.rank << ',' << (p.sign > 0 ? '+' : '-') << ',' << m.label.str() << ','
                    << detail::csv_field(m.name) << ',' << detail::csv_field(m.exchange) << ','
                    << detail::csv_field(m.country) << ',' << fmt(p.component) << '\n';
            }
        }
    }
}

PairReport pair_report(const MarketModeRemoval& mr, const CorrelationMatrix& original, std::size_t count) {
    const auto& sd = mr.residual_spectrum;
    const std::size_t n = sd.size();
    if (count > n) {
        throw Error(ErrorKind::Parameter, kModule,
                    "pair count " + std::to_string(count) + " exceeds residual matrix size " + std::to_string(n));
    }
    if (n < 2 && count > 0) throw Error(ErrorKind::Parameter, kModule, "pairs need at least two instruments");

    const auto coefficients = off_diagonal(original);

    PairReport rep;
    for (std::size_t step = 0; step < count; ++step) {
        const int rank = static_cast<int>(n - step);
        const Eigen::VectorXd u = sd.vector(rank);
        std::vector<Eigen::Index> order(static_cast<std::size_t>(u.size()));
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](Eigen::Index a, Eigen::Index b) { return std::abs(u(a)) > std::abs(u(b)); });

        PairEntry e;
        e.rank = rank;
        e.eigenvalue = sd.value(rank);
        const auto ia = order[0];
        const auto ib = order[1];
        e.a = sd.instruments[static_cast<std::size_t>(ia)];
        e.b = sd.instruments[static_cast<std::size_t>(ib)];
        e.component_a = u(ia);
        e.component_b = u(ib);
        e.sign_a = sign_of(u(ia));
        e.sign_b = sign_of(u(ib));

        const auto oa = original.index_of(e.a.label);
        const auto ob = original.index_of(e.b.label);
        if (!oa || !ob) {
            throw Error(ErrorKind::Integrity, kModule, "pair instruments missing from the original correlation matrix");
        }
        e.c_ij = original.c(static_cast<Eigen::Index>(*oa), static_cast<Eigen::Index>(*ob));
        e.correlation_rank =
            1 + static_cast<std::size_t>(std::count_if(coefficients.begin(), coefficients.end(),
                                                       [&](double c) { return c > e.c_ij; }));
        e.top2_share = u(ia) * u(ia) + u(ib) * u(ib);
        e.null_mode = std::abs(e.eigenvalue) < kNullEigenvalue;
        e.dominant = !e.null_mode && e.top2_share >= kDominantPairShare;
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

void write_pairs_csv(std::ostream& out, const PairReport& report, const NumberFormat& fmt) {
    out << "eigenvector_rank,label_a,label_b,sign_a,sign_b,c_ij\n";
    for (const auto& e : report.entries) {
        out << e.rank << ',' << e.a.label.str() << ',' << e.b.label.str() << ',' << (e.sign_a > 0 ? '+' : '-') << ','
            << (e.sign_b > 0 ? '+' : '-') << ',' << fmt(e.c_ij) << '\n';
    }
}

}  // namespace eigenmarket
