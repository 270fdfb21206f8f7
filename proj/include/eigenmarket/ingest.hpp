/**
 * @file ingest.hpp
 * @brief Price panels: CSV loading, gap filling and exclusion dates.
 *
 * A panel is N instruments by T dates. Raw panels coming out of the loader
 * may contain missing cells; `align_and_fill` resolves every gap, after which
 * all prices are positive and finite.
 */
#pragma once

#include "eigenmarket/date.hpp"
#include "eigenmarket/format.hpp"

#include <Eigen/Core>

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace eigenmarket {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Positive integer instrument identifier.
struct InstrumentLabel {
    std::uint32_t value = 0;

    static InstrumentLabel parse(std::string_view text);
    std::string str() const { return std::to_string(value); }

    friend auto operator<=>(const InstrumentLabel&, const InstrumentLabel&) = default;
};

struct InstrumentMeta {
    InstrumentLabel label;
    std::string name;
    std::string exchange;
    std::string country;
    std::optional<Date> listing_date;
    std::string commodity;  ///< optional grouping tag, empty when not supplied
};

enum class FillFlag : std::uint8_t { Missing, Observed, BackfilledFromListing, ForwardFilled };

char flag_code(FillFlag flag);

class PricePanel {
public:
    /// Validates shapes, unique labels and strictly increasing dates.
    PricePanel(std::vector<InstrumentMeta> instruments, std::vector<Date> dates, RowMatrix prices,
               std::vector<FillFlag> flags);

    std::size_t instrument_count() const { return instruments_.size(); }
    std::size_t date_count() const { return dates_.size(); }

    const std::vector<InstrumentMeta>& instruments() const { return instruments_; }
    const std::vector<Date>& dates() const { return dates_; }
    const RowMatrix& prices() const { return prices_; }
    FillFlag flag(std::size_t instrument, std::size_t date) const {
        return flags_[instrument * dates_.size() + date];
    }
    const std::vector<FillFlag>& flags() const { return flags_; }

    std::size_t count(FillFlag flag) const;
    bool is_filled() const { return count(FillFlag::Missing) == 0; }

private:
    std::vector<InstrumentMeta> instruments_;
    std::vector<Date> dates_;
    RowMatrix prices_;
    std::vector<FillFlag> flags_;  // row-major, instrument-by-date
};

struct ExclusionCalendar {
    std::set<Date> dates;
};

/// Reads a `date,<label>,...` CSV. Lines starting with `#` before the header
/// are comments. Rows are sorted by date; instrument order is column order.
PricePanel load_panel(const std::filesystem::path& path);
PricePanel parse_panel(std::istream& in, const std::string& source = "<stream>");

/// Reads `label,name,exchange,country,listing_date[,commodity]`.
std::vector<InstrumentMeta> load_metadata(const std::filesystem::path& path);
std::vector<InstrumentMeta> parse_metadata(std::istream& in, const std::string& source = "<stream>");

/// Replaces panel metadata with sidecar rows matched by label. Instruments
/// without a sidecar row keep their defaults.
PricePanel attach_metadata(const PricePanel& panel, const std::vector<InstrumentMeta>& meta);

/// One ISO date per line; `#` starts a comment.
ExclusionCalendar load_exclusions(const std::filesystem::path& path);
ExclusionCalendar parse_exclusions(std::istream& in, const std::string& source = "<stream>");

/// Cells before an instrument's first observation take that first price
/// (flagged BackfilledFromListing); later gaps repeat the most recent
/// earlier price (ForwardFilled).
PricePanel align_and_fill(const PricePanel& raw);

struct ExclusionResult {
    PricePanel panel;
    std::vector<Date> ignored;  ///< calendar dates absent from the panel
};

/// Drops the columns of every calendar date present in the panel, for all instruments.
ExclusionResult apply_exclusions(const PricePanel& panel, const ExclusionCalendar& calendar);

/// Equal-weight mean price per date.
std::vector<double> average_price(const PricePanel& panel);

/// Writes the panel in loader format; missing cells are empty fields.
void write_panel_csv(std::ostream& out, const PricePanel& panel, const NumberFormat& fmt);
/// Same layout with a one-letter flag code per cell (O, B, F, M).
void write_flags_csv(std::ostream& out, const PricePanel& panel);

}  // namespace eigenmarket
