#include "eigenmarket/format.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace eigenmarket {

std::string format_roundtrip(double value) {
    if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

std::string format_significant(double value, int digits) {
    if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
    if (value == 0.0) return "0";  // also folds -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, value);
    return buf;
}

std::string NumberFormat::operator()(double value) const {
    return full_precision ? format_roundtrip(value) : format_significant(value, 6);
}

}  // namespace eigenmarket
