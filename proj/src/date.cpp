#include "eigenmarket/date.hpp"

#include "eigenmarket/error.hpp"

#include <charconv>
#include <cstdio>

namespace eigenmarket {

namespace {

bool parse_digits(std::string_view text, int& value) {
    if (text.empty()) return false;
    for (char ch : text) {
        if (ch < '0' || ch > '9') return false;
    }
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day) {
    const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                          std::chrono::day{day}};
    if (!ymd.ok()) {
        throw Error(ErrorKind::Parse, "date",
                    "invalid calendar date " + std::to_string(year) + "-" + std::to_string(month) + "-" +
                        std::to_string(day));
    }
    days_ = std::chrono::sys_days{ymd};
}

Date Date::parse(std::string_view text) {
    int y = 0, m = 0, d = 0;
    const bool shape = text.size() == 10 && text[4] == '-' && text[7] == '-';
    if (!shape || !parse_digits(text.substr(0, 4), y) || !parse_digits(text.substr(5, 2), m) ||
        !parse_digits(text.substr(8, 2), d)) {
        throw Error(ErrorKind::Parse, "date", "malformed date '" + std::string(text) + "', expected YYYY-MM-DD");
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) {
        throw Error(ErrorKind::Parse, "date", "invalid calendar date '" + std::string(text) + "'");
    }
    return Date(std::chrono::sys_days{ymd});
}

std::string Date::iso() const {
    const std::chrono::year_month_day ymd{days_};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

unsigned Date::weekday() const { return std::chrono::weekday{days_}.c_encoding(); }

}  // namespace eigenmarket
