#include "eigenmarket/returns.hpp"

#include "csv.hpp"
#include "eigenmarket/error.hpp"
#include "eigenmarket/histogram.hpp"
#include "eigenmarket/parallel.hpp"

#include <cmath>
#include <ostream>
#include <span>

namespace eigenmarket {

ReturnPanel compute_returns(const PricePanel& panel, const ExclusionCalendar& calendar) {
    if (!panel.is_filled()) {
        throw Error(ErrorKind::Integrity, "returns", "panel has missing cells; run align_and_fill first");
    }
    const ExclusionResult trimmed = apply_exclusions(panel, calendar);
    const PricePanel& p = trimmed.panel;
    const std::size_t n = p.instrument_count();
    const std::size_t t = p.date_count();
    if (t < 2) throw Error(ErrorKind::Parameter, "returns", "need at least two price dates, got " + std::to_string(t));

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < t; ++j) {
            const double v = p.prices()(i, j);
            if (!(v > 0.0) || !std::isfinite(v)) {
                throw Error(ErrorKind::Domain, "returns",
                            "non-positive price " + format_roundtrip(v) + " for instrument " +
                                p.instruments()[i].label.str() + " on " + p.dates()[j].iso());
            }
        }
    }

    ReturnPanel rp;
    rp.instruments = p.instruments();
    rp.base_date = p.dates().front();
    rp.dates.assign(p.dates().begin() + 1, p.dates().end());
    rp.returns.resize(n, t - 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 1; j < t; ++j) {
            rp.returns(i, j - 1) = std::log(p.prices()(i, j)) - std::log(p.prices()(i, j - 1));
        }
    }
    return rp;
}

Eigen::VectorXd mean_return(const ReturnPanel& rp) {
    return rp.returns.colwise().mean().transpose();
}

std::vector<DescriptiveStats> descriptive_stats(const ReturnPanel& rp) {
    const std::size_t n = rp.instrument_count();
    const std::size_t t = rp.observation_count();
    if (t < 1) throw Error(ErrorKind::Parameter, "returns", "descriptive statistics need at least one return");

    std::vector<DescriptiveStats> out(n);
    parallel_for(n, [&](std::size_t i) {
        const MomentSummary s = summarize(std::span<const double>(rp.returns.row(static_cast<Eigen::Index>(i)).data(), t));
        auto& d = out[i];
        d.instrument = rp.instruments[i];
        d.max = s.max;
        d.min = s.min;
        d.mean = s.mean;
        d.sd = s.sd;
        d.skewness = s.skewness;
        d.kurtosis = s.kurtosis;
    });
    return out;
}

void write_stats_csv(std::ostream& out, const std::vector<DescriptiveStats>& stats, const NumberFormat& fmt) {
    auto opt = [&](const std::optional<double>& v) { return v ? fmt(*v) : std::string("NA"); };
    out << "label,name,exchange,country,listing_date,max,min,mean_e4,sd,skewness,kurtosis\n";
    for (const auto& s : stats) {
        const auto& m = s.instrument;
        out << m.label.str() << ',' << detail::csv_field(m.name) << ',' << detail::csv_field(m.exchange) << ','
            << detail::csv_field(m.country) << ',' << (m.listing_date ? m.listing_date->iso() : std::string()) << ','
            << fmt(s.max) << ',' << fmt(s.min) << ',' << fmt(s.mean * 1e4) << ',' << fmt(s.sd) << ','
            << opt(s.skewness) << ',' << opt(s.kurtosis) << '\n';
    }
}

}  // namespace eigenmarket
