#pragma once

#include <string>

namespace eigenmarket {

/// Decimal rendering policy for every numeric artifact.
struct NumberFormat {
    bool full_precision = false;  ///< shortest round-trip representation instead of 6 significant digits

    std::string operator()(double value) const;
};

/// Shortest decimal string that parses back to exactly `value`.
std::string format_roundtrip(double value);

/// `value` with `digits` significant digits (printf %g semantics).
std::string format_significant(double value, int digits = 6);

}  // namespace eigenmarket
