#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace eigenmarket {

/// Calendar date with day resolution. Parsed from and printed as ISO-8601 `YYYY-MM-DD`.
class Date {
public:
    Date() = default;
    explicit Date(std::chrono::sys_days days) : days_(days) {}
    Date(int year, unsigned month, unsigned day);

    /// Throws Error{Parse} on anything other than a valid `YYYY-MM-DD`.
    static Date parse(std::string_view text);

    std::string iso() const;
    std::chrono::sys_days days() const { return days_; }
    Date next_day() const { return Date(days_ + std::chrono::days{1}); }
    unsigned weekday() const;  ///< 0 = Sunday

    friend auto operator<=>(const Date&, const Date&) = default;
    friend bool operator==(const Date&, const Date&) = default;

private:
    std::chrono::sys_days days_{};
};

}  // namespace eigenmarket
