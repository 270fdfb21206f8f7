/**
 * @file cli.hpp
 * @brief Subcommand dispatch for the `eigenmarket` command-line tool.
 */
#pragma once

#include "eigenmarket/format.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace eigenmarket::cli {

/// Exit codes. Missing inputs are reported before any artifact is written.
enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kMissingInput = 2,
    kDomainError = 3,
    kParseError = 4,
    kParameterError = 5,
    kNumericalError = 6,
};

struct RunConfig {
    std::filesystem::path input;
    std::optional<std::filesystem::path> meta;
    std::optional<std::filesystem::path> exclusions;
    std::filesystem::path out = "out";
    int bins = 50;
    double threshold = 1.5;
    std::vector<int> ranks{1, 2, 3, 4, 5};
    std::vector<int> sector_ranks{2, 3, 4, 5};
    std::size_t count = 6;
    std::string base = "auto";
    std::uint64_t seed = 0;
    NumberFormat fmt;
};

/// Parses "1,2,5" and "2-5" (and mixtures such as "1,3-4").
std::vector<int> parse_ranks(const std::string& text);

/// Runs every stage and writes all artifacts plus `manifest.json` into cfg.out.
int run_full_report(const RunConfig& cfg, std::ostream& log);

/// Entry point used by the executable. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace eigenmarket::cli
