#include "eigenmarket/ingest.hpp"

#include "csv.hpp"
#include "eigenmarket/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>

namespace eigenmarket {

namespace {

constexpr const char* kModule = "ingest";

[[noreturn]] void fail(ErrorKind kind, const std::string& message) { throw Error(kind, kModule, message); }

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open '" + path.string() + "'");
    return in;
}

std::string where(const std::string& source, std::size_t line_no) {
    return source + ":" + std::to_string(line_no);
}

bool is_comment_or_blank(std::string_view line) {
    const auto t = detail::trim(line);
    return t.empty() || t.front() == '#';
}

}  // namespace

InstrumentLabel InstrumentLabel::parse(std::string_view text) {
    const auto t = detail::trim(text);
    std::uint32_t value = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size() || value == 0) {
        throw Error(ErrorKind::Parse, kModule,
                    "instrument label '" + std::string(text) + "' is not a positive integer");
    }
    return InstrumentLabel{value};
}

char flag_code(FillFlag flag) {
    switch (flag) {
        case FillFlag::Missing: return 'M';
        case FillFlag::Observed: return 'O';
        case FillFlag::BackfilledFromListing: return 'B';
        case FillFlag::ForwardFilled: return 'F';
    }
    return '?';
}

PricePanel::PricePanel(std::vector<InstrumentMeta> instruments, std::vector<Date> dates, RowMatrix prices,
                       std::vector<FillFlag> flags)
    : instruments_(std::move(instruments)),
      dates_(std::move(dates)),
      prices_(std::move(prices)),
      flags_(std::move(flags)) {
    const auto n = instruments_.size();
    const auto t = dates_.size();
    if (static_cast<std::size_t>(prices_.rows()) != n || static_cast<std::size_t>(prices_.cols()) != t ||
        flags_.size() != n * t) {
        fail(ErrorKind::Integrity, "panel shape mismatch: " + std::to_string(n) + " instruments, " +
                                       std::to_string(t) + " dates");
    }
    for (std::size_t j = 1; j < t; ++j) {
        if (!(dates_[j - 1] < dates_[j])) {
            fail(ErrorKind::Integrity, "panel dates must be strictly increasing at " + dates_[j].iso());
        }
    }
    std::vector<InstrumentLabel> labels;
    labels.reserve(n);
    for (const auto& m : instruments_) labels.push_back(m.label);
    std::sort(labels.begin(), labels.end());
    if (auto dup = std::adjacent_find(labels.begin(), labels.end()); dup != labels.end()) {
        fail(ErrorKind::Integrity, "duplicate instrument label " + dup->str());
    }
}

std::size_t PricePanel::count(FillFlag flag) const {
    return static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), flag));
}

PricePanel load_panel(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_panel(in, path.string());
}

PricePanel parse_panel(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t line_no = 0;

    bool have_header = false;
    while (detail::next_line(in, line, line_no)) {
        if (!is_comment_or_blank(line)) {
            have_header = true;
            break;
        }
    }
    if (!have_header) fail(ErrorKind::Parse, source + ": no header row");

    const auto header = detail::split_csv_line(line);
    if (header.size() < 2 || header[0] != "date") {
        fail(ErrorKind::Parse, where(source, line_no) + ": header must be 'date,<label>,...'");
    }
    std::vector<InstrumentMeta> instruments;
    for (std::size_t c = 1; c < header.size(); ++c) {
        InstrumentMeta meta;
        try {
            meta.label = InstrumentLabel::parse(header[c]);
        } catch (const Error& e) {
            fail(ErrorKind::Parse, where(source, line_no) + ": " + e.what());
        }
        meta.name = meta.label.str();
        instruments.push_back(std::move(meta));
    }
    const std::size_t n = instruments.size();

    struct Row {
        Date date;
        std::size_t line_no;
        std::vector<double> values;  // NaN marks a missing cell
    };
    std::vector<Row> rows;
    while (detail::next_line(in, line, line_no)) {
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != n + 1) {
            fail(ErrorKind::Parse, where(source, line_no) + ": expected " + std::to_string(n + 1) +
                                       " fields, found " + std::to_string(fields.size()));
        }
        Row row;
        row.line_no = line_no;
        try {
            row.date = Date::parse(fields[0]);
        } catch (const Error& e) {
            fail(ErrorKind::Parse, "row " + std::to_string(line_no) + " (" + where(source, line_no) + "): " + e.what());
        }
        row.values.resize(n);
        for (std::size_t c = 0; c < n; ++c) {
            const std::string& cell = fields[c + 1];
            if (cell.empty()) {
                row.values[c] = std::nan("");
                continue;
            }
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
                fail(ErrorKind::Parse, where(source, line_no) + ": cell (" + fields[0] + ", " +
                                           instruments[c].label.str() + ") = '" + cell + "' is not numeric");
            }
            row.values[c] = v;
        }
        rows.push_back(std::move(row));
    }

    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.date < b.date; });
    for (std::size_t j = 1; j < rows.size(); ++j) {
        if (rows[j].date == rows[j - 1].date) {
            fail(ErrorKind::Integrity, source + ": duplicate date " + rows[j].date.iso() + " on lines " +
                                           std::to_string(rows[j - 1].line_no) + " and " +
                                           std::to_string(rows[j].line_no));
        }
    }

    const std::size_t t = rows.size();
    std::vector<Date> dates(t);
    RowMatrix prices(n, t);
    std::vector<FillFlag> flags(n * t, FillFlag::Missing);
    for (std::size_t j = 0; j < t; ++j) {
        dates[j] = rows[j].date;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = rows[j].values[i];
            prices(i, j) = v;
            if (!std::isnan(v)) {
                flags[i * t + j] = FillFlag::Observed;
                if (!instruments[i].listing_date) instruments[i].listing_date = dates[j];
            }
        }
    }
    return PricePanel(std::move(instruments), std::move(dates), std::move(prices), std::move(flags));
}

std::vector<InstrumentMeta> load_metadata(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_metadata(in, path.string());
}

std::vector<InstrumentMeta> parse_metadata(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (detail::next_line(in, line, line_no)) {
        if (!is_comment_or_blank(line)) {
            have_header = true;
            break;
        }
    }
    if (!have_header) fail(ErrorKind::Parse, source + ": no header row");
    const auto header = detail::split_csv_line(line);
    const std::vector<std::string> expected{"label", "name", "exchange", "country", "listing_date"};
    if (header.size() < expected.size() || !std::equal(expected.begin(), expected.end(), header.begin()) ||
        (header.size() == 6 && header[5] != "commodity") || header.size() > 6) {
        fail(ErrorKind::Parse,
             where(source, line_no) + ": header must be 'label,name,exchange,country,listing_date[,commodity]'");
    }

    std::vector<InstrumentMeta> out;
    std::map<InstrumentLabel, std::size_t> seen;
    while (detail::next_line(in, line, line_no)) {
        if (is_comment_or_blank(line)) continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() != header.size()) {
            fail(ErrorKind::Parse, where(source, line_no) + ": expected " + std::to_string(header.size()) +
                                       " fields, found " + std::to_string(f.size()));
        }
        InstrumentMeta m;
        try {
            m.label = InstrumentLabel::parse(f[0]);
            if (!f[4].empty()) m.listing_date = Date::parse(f[4]);
        } catch (const Error& e) {
            fail(ErrorKind::Parse, where(source, line_no) + ": " + e.what());
        }
        m.name = f[1];
        m.exchange = f[2];
        m.country = f[3];
        if (f.size() == 6) m.commodity = f[5];
        if (!seen.emplace(m.label, line_no).second) {
            fail(ErrorKind::Integrity, where(source, line_no) + ": duplicate label " + m.label.str());
        }
        out.push_back(std::move(m));
    }
    return out;
}

PricePanel attach_metadata(const PricePanel& panel, const std::vector<InstrumentMeta>& meta) {
    std::map<InstrumentLabel, const InstrumentMeta*> by_label;
    for (const auto& m : meta) by_label[m.label] = &m;

    auto instruments = panel.instruments();
    for (auto& inst : instruments) {
        auto it = by_label.find(inst.label);
        if (it == by_label.end()) continue;
        const auto fallback_listing = inst.listing_date;
        inst = *it->second;
        if (!inst.listing_date) inst.listing_date = fallback_listing;
        if (inst.listing_date && !panel.dates().empty() && *inst.listing_date > panel.dates().back()) {
            fail(ErrorKind::Integrity, "instrument " + inst.label.str() + " lists on " + inst.listing_date->iso() +
                                           ", after the panel's last date " + panel.dates().back().iso());
        }
    }
    return PricePanel(std::move(instruments), panel.dates(), panel.prices(), panel.flags());
}

ExclusionCalendar load_exclusions(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_exclusions(in, path.string());
}

ExclusionCalendar parse_exclusions(std::istream& in, const std::string& source) {
    ExclusionCalendar cal;
    std::string line;
    std::size_t line_no = 0;
    while (detail::next_line(in, line, line_no)) {
        std::string_view view = line;
        if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = detail::trim(view);
        if (view.empty()) continue;
        try {
            cal.dates.insert(Date::parse(view));
        } catch (const Error& e) {
            fail(ErrorKind::Parse, where(source, line_no) + ": " + e.what());
        }
    }
    return cal;
}

PricePanel align_and_fill(const PricePanel& raw) {
    const std::size_t n = raw.instrument_count();
    const std::size_t t = raw.date_count();
    RowMatrix prices = raw.prices();
    std::vector<FillFlag> flags = raw.flags();

    for (std::size_t i = 0; i < n; ++i) {
        FillFlag* row = flags.data() + i * t;
        std::size_t first = t;
        for (std::size_t j = 0; j < t; ++j) {
            if (row[j] != FillFlag::Missing) {
                first = j;
                break;
            }
        }
        if (first == t) {
            fail(ErrorKind::Integrity, "instrument " + raw.instruments()[i].label.str() + " has no observed prices");
        }
        for (std::size_t j = 0; j < first; ++j) {
            prices(i, j) = prices(i, first);
            row[j] = FillFlag::BackfilledFromListing;
        }
        for (std::size_t j = first + 1; j < t; ++j) {
            if (row[j] == FillFlag::Missing) {
                prices(i, j) = prices(i, j - 1);
                row[j] = FillFlag::ForwardFilled;
            }
        }
    }
    return PricePanel(raw.instruments(), raw.dates(), std::move(prices), std::move(flags));
}

ExclusionResult apply_exclusions(const PricePanel& panel, const ExclusionCalendar& calendar) {
    std::vector<std::size_t> keep;
    keep.reserve(panel.date_count());
    for (std::size_t j = 0; j < panel.date_count(); ++j) {
        if (!calendar.dates.contains(panel.dates()[j])) keep.push_back(j);
    }
    std::vector<Date> ignored;
    for (const Date& d : calendar.dates) {
        if (!std::binary_search(panel.dates().begin(), panel.dates().end(), d)) ignored.push_back(d);
    }
    if (keep.size() == panel.date_count()) return {panel, std::move(ignored)};

    const std::size_t n = panel.instrument_count();
    const std::size_t t = keep.size();
    std::vector<Date> dates(t);
    RowMatrix prices(n, t);
    std::vector<FillFlag> flags(n * t);
    for (std::size_t k = 0; k < t; ++k) {
        dates[k] = panel.dates()[keep[k]];
        for (std::size_t i = 0; i < n; ++i) {
            prices(i, k) = panel.prices()(i, keep[k]);
            flags[i * t + k] = panel.flag(i, keep[k]);
        }
    }
    return {PricePanel(panel.instruments(), std::move(dates), std::move(prices), std::move(flags)),
            std::move(ignored)};
}

std::vector<double> average_price(const PricePanel& panel) {
    if (!panel.is_filled()) fail(ErrorKind::Integrity, "average price requires a filled panel");
    std::vector<double> avg(panel.date_count(), 0.0);
    const auto n = static_cast<double>(panel.instrument_count());
    for (std::size_t j = 0; j < panel.date_count(); ++j) avg[j] = panel.prices().col(static_cast<Eigen::Index>(j)).sum() / n;
    return avg;
}

void write_panel_csv(std::ostream& out, const PricePanel& panel, const NumberFormat& fmt) {
    out << "date";
    for (const auto& m : panel.instruments()) out << ',' << m.label.str();
    out << '\n';
    for (std::size_t j = 0; j < panel.date_count(); ++j) {
        out << panel.dates()[j].iso();
        for (std::size_t i = 0; i < panel.instrument_count(); ++i) {
            out << ',';
            if (panel.flag(i, j) != FillFlag::Missing) out << fmt(panel.prices()(i, j));
        }
        out << '\n';
    }
}

void write_flags_csv(std::ostream& out, const PricePanel& panel) {
    out << "date";
    for (const auto& m : panel.instruments()) out << ',' << m.label.str();
    out << '\n';
    for (std::size_t j = 0; j < panel.date_count(); ++j) {
        out << panel.dates()[j].iso();
        for (std::size_t i = 0; i < panel.instrument_count(); ++i) out << ',' << flag_code(panel.flag(i, j));
        out << '\n';
    }
}

}  // namespace eigenmarket
