// Internal CSV helpers shared by the loaders.
#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace eigenmarket::detail {

/// Splits one line on commas, honouring double-quoted fields ("" escapes a quote).
std::vector<std::string> split_csv_line(std::string_view line);

std::string_view trim(std::string_view text);

/// Reads the next line, dropping a trailing '\r'. Tracks the 1-based line number.
bool next_line(std::istream& in, std::string& line, std::size_t& line_no);

/// Quotes a field if it contains a comma, quote or newline.
std::string csv_field(std::string_view text);

}  // namespace eigenmarket::detail
