#include "doctest.h"

#include "eigenmarket/error.hpp"
#include "eigenmarket/ingest.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace eigenmarket;

namespace {

PricePanel parse(const std::string& text) {
    std::istringstream in(text);
    return parse_panel(in, "test.csv");
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an eigenmarket::Error");
    return ErrorKind::Io;
}

std::vector<double> row_prices(const PricePanel& p, std::size_t i) {
    std::vector<double> out;
    for (std::size_t j = 0; j < p.date_count(); ++j) out.push_back(p.prices()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    return out;
}

std::vector<FillFlag> row_flags(const PricePanel& p, std::size_t i) {
    std::vector<FillFlag> out;
    for (std::size_t j = 0; j < p.date_count(); ++j) out.push_back(p.flag(i, j));
    return out;
}

}  // namespace

TEST_CASE("load_panel reads a complete CSV") {
    const auto p = parse("date,1,2\n2020-01-02,100,50\n2020-01-03,101,51\n");
    CHECK(p.instrument_count() == 2);
    CHECK(p.date_count() == 2);
    CHECK(p.count(FillFlag::Observed) == 4);
    CHECK(p.instruments()[1].label.value == 2);
    CHECK(p.prices()(1, 1) == 51.0);
}

TEST_CASE("load_panel marks empty cells missing and sorts dates") {
    const auto p = parse("# comment\ndate,7,3\n2020-01-03,101,\n2020-01-02,100,50\n");
    REQUIRE(p.date_count() == 2);
    CHECK(p.dates()[0] == Date(2020, 1, 2));
    CHECK(p.flag(1, 1) == FillFlag::Missing);
    CHECK(p.flag(0, 1) == FillFlag::Observed);
    CHECK(p.instruments()[0].label.value == 7);  // column order kept
    CHECK_FALSE(p.is_filled());
}

TEST_CASE("load_panel errors") {
    SUBCASE("invalid month names the row") {
        try {
            parse("date,1\n2020-01-02,1\n2020-13-01,2\n");
            FAIL("no throw");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Parse);
            CHECK(std::string(e.what()).find("row 3") != std::string::npos);
        }
    }
    SUBCASE("non-numeric cell names the cell") {
        try {
            parse("date,1,2\n2020-01-02,1,abc\n");
            FAIL("no throw");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Parse);
            CHECK(std::string(e.what()).find("abc") != std::string::npos);
            CHECK(std::string(e.what()).find("2020-01-02, 2") != std::string::npos);
        }
    }
    SUBCASE("duplicate date") {
        CHECK(kind_of([] { parse("date,1\n2020-01-02,1\n2020-01-02,2\n"); }) == ErrorKind::Integrity);
    }
    SUBCASE("bad header and labels") {
        CHECK(kind_of([] { parse("day,1\n2020-01-02,1\n"); }) == ErrorKind::Parse);
        CHECK(kind_of([] { parse("date,abc\n2020-01-02,1\n"); }) == ErrorKind::Parse);
        CHECK(kind_of([] { parse("date,1,1\n2020-01-02,1,2\n"); }) == ErrorKind::Integrity);
    }
    SUBCASE("ragged row") {
        CHECK(kind_of([] { parse("date,1,2\n2020-01-02,1\n"); }) == ErrorKind::Parse);
    }
    SUBCASE("missing file") {
        CHECK(kind_of([] { load_panel("/nonexistent/panel.csv"); }) == ErrorKind::Io);
    }
}

TEST_CASE("align_and_fill hand traces") {
    SUBCASE("leading gap backfills, interior gap forward fills") {
        const auto p = align_and_fill(parse("date,1\n2020-01-01,\n2020-01-02,\n2020-01-03,105\n2020-01-04,\n2020-01-05,110\n"));
        CHECK(row_prices(p, 0) == std::vector<double>{105, 105, 105, 105, 110});
        CHECK(row_flags(p, 0) == std::vector<FillFlag>{FillFlag::BackfilledFromListing, FillFlag::BackfilledFromListing,
                                                       FillFlag::Observed, FillFlag::ForwardFilled, FillFlag::Observed});
    }
    SUBCASE("two consecutive gaps fall back two days") {
        const auto p = align_and_fill(parse("date,1\n2020-01-01,\n2020-01-02,100\n2020-01-03,\n2020-01-04,\n2020-01-05,102\n"));
        CHECK(row_prices(p, 0) == std::vector<double>{100, 100, 100, 100, 102});
    }
    SUBCASE("fully observed series is unchanged") {
        const auto raw = parse("date,1\n2020-01-01,1\n2020-01-02,2\n");
        const auto p = align_and_fill(raw);
        CHECK(p.prices() == raw.prices());
        CHECK(p.count(FillFlag::Observed) == 2);
    }
    SUBCASE("instrument without observations") {
        try {
            align_and_fill(parse("date,1,9\n2020-01-01,1,\n2020-01-02,2,\n"));
            FAIL("no throw");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Integrity);
            CHECK(std::string(e.what()).find("instrument 9") != std::string::npos);
        }
    }
}

TEST_CASE("align_and_fill properties on random gap patterns") {
    std::mt19937_64 rng(11);
    std::bernoulli_distribution gap(0.3);
    std::uniform_real_distribution<double> price(10.0, 200.0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng() % 5, t = 2 + rng() % 20;
        std::vector<InstrumentMeta> inst;
        for (std::size_t i = 0; i < n; ++i) inst.push_back(InstrumentMeta{InstrumentLabel{static_cast<std::uint32_t>(i + 1)}});
        std::vector<Date> dates;
        Date d{2021, 3, 1};
        for (std::size_t j = 0; j < t; ++j, d = d.next_day()) dates.push_back(d);
        RowMatrix prices(n, t);
        std::vector<FillFlag> flags(n * t);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < t; ++j) {
                const bool miss = gap(rng) && !(j == t - 1);  // keep one observation per row
                prices(i, j) = miss ? std::nan("") : price(rng);
                flags[i * t + j] = miss ? FillFlag::Missing : FillFlag::Observed;
            }
        }
        const PricePanel raw(inst, dates, prices, flags);
        const auto once = align_and_fill(raw);
        const auto twice = align_and_fill(once);
        CHECK(once.is_filled());
        CHECK(once.prices() == twice.prices());
        CHECK(once.flags() == twice.flags());
        CHECK(once.count(FillFlag::Observed) == raw.count(FillFlag::Observed));
        CHECK(once.prices().allFinite());
        CHECK(once.prices().minCoeff() > 0.0);
    }
}

TEST_CASE("apply_exclusions removes dates panel-wide") {
    const auto p = align_and_fill(parse(
        "date,1,2\n2020-01-01,1,2\n2020-01-02,3,4\n2020-01-03,5,6\n2020-01-04,7,8\n2020-01-05,9,10\n"));
    SUBCASE("one date") {
        const auto r = apply_exclusions(p, ExclusionCalendar{{Date(2020, 1, 3)}});
        CHECK(r.panel.date_count() == 4);
        CHECK(r.panel.instrument_count() == 2);
        CHECK(r.ignored.empty());
        CHECK(r.panel.prices()(1, 2) == 8.0);
    }
    SUBCASE("empty calendar is identity") {
        const auto r = apply_exclusions(p, {});
        CHECK(r.panel.prices() == p.prices());
        CHECK(r.panel.dates() == p.dates());
    }
    SUBCASE("date outside the panel is recorded and ignored") {
        const auto r = apply_exclusions(p, ExclusionCalendar{{Date(2019, 5, 5)}});
        CHECK(r.panel.date_count() == 5);
        REQUIRE(r.ignored.size() == 1);
        CHECK(r.ignored[0] == Date(2019, 5, 5));
    }
}

TEST_CASE("metadata sidecar and exclusion calendar parsing") {
    std::istringstream meta("label,name,exchange,country,listing_date,commodity\n"
                            "1,\"Wheat, hard red\",CBOT,US,2000-01-04,wheat\n2,Corn,DCE,CN,,corn\n");
    const auto m = parse_metadata(meta);
    REQUIRE(m.size() == 2);
    CHECK(m[0].name == "Wheat, hard red");
    CHECK(m[0].listing_date == Date(2000, 1, 4));
    CHECK_FALSE(m[1].listing_date.has_value());
    CHECK(m[1].commodity == "corn");

    const auto p = parse("date,1,2\n2000-01-03,,5\n2000-01-04,1,6\n");
    const auto with = attach_metadata(p, m);
    CHECK(with.instruments()[0].exchange == "CBOT");
    CHECK(with.instruments()[1].listing_date == Date(2000, 1, 3));  // first observation

    std::istringstream late("label,name,exchange,country,listing_date\n1,X,E,C,2030-01-01\n");
    CHECK(kind_of([&] { attach_metadata(p, parse_metadata(late)); }) == ErrorKind::Integrity);

    std::istringstream cal("# contract unit changes\n2000-01-04\n\n2001-02-03  # trailing comment\n");
    const auto c = parse_exclusions(cal);
    CHECK(c.dates.size() == 2);
    CHECK(c.dates.contains(Date(2001, 2, 3)));
}

TEST_CASE("panel CSV writer round-trips through the loader") {
    const auto p = parse("date,4,2\n2020-01-01,1.5,\n2020-01-02,2.25,3\n");
    std::ostringstream os;
    write_panel_csv(os, p, NumberFormat{true});
    const auto back = parse(os.str());
    CHECK(back.flags() == p.flags());
    CHECK(back.prices()(0, 1) == 2.25);
    CHECK(back.dates() == p.dates());
}
