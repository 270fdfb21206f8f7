#pragma once

#include "eigenmarket/ingest.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace eigenmarket {

/// Daily log returns, one row per instrument.
struct ReturnPanel {
    std::vector<InstrumentMeta> instruments;
    Date base_date;            ///< price date preceding the first return
    std::vector<Date> dates;   ///< one per return column
    RowMatrix returns;         ///< N x T'
    int dt_days = 1;

    std::size_t instrument_count() const { return instruments.size(); }
    std::size_t observation_count() const { return dates.size(); }
};

/// r_i(t) = ln P_i(t) - ln P_i(t-1) over the panel with the calendar's dates
/// removed first, so a return following an excluded day spans the gap.
ReturnPanel compute_returns(const PricePanel& panel, const ExclusionCalendar& calendar = {});

/// Equal-weight cross-sectional mean return per date, <r>(t).
Eigen::VectorXd mean_return(const ReturnPanel& rp);

struct DescriptiveStats {
    InstrumentMeta instrument;
    double max = 0.0;
    double min = 0.0;
    double mean = 0.0;
    double sd = 0.0;                  ///< population convention
    std::optional<double> skewness;   ///< unset for a zero-variance series
    std::optional<double> kurtosis;   ///< raw; unset for a zero-variance series
};

std::vector<DescriptiveStats> descriptive_stats(const ReturnPanel& rp);

/// Table-1 layout: label,name,exchange,country,listing_date,max,min,mean_e4,sd,skewness,kurtosis
void write_stats_csv(std::ostream& out, const std::vector<DescriptiveStats>& stats, const NumberFormat& fmt);

}  // namespace eigenmarket
