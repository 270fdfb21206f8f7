/**
 * @file error.hpp
 * @brief Exception type shared by every pipeline stage.
 */
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eigenmarket {

enum class ErrorKind {
    Io,            ///< file missing or unreadable
    Parse,         ///< malformed input text
    Integrity,     ///< input violates a structural rule (duplicates, empty series)
    Domain,        ///< value outside the mathematical domain of an operation
    Parameter,     ///< caller-supplied parameter out of range
    Numerical,     ///< solver failure
    Specification  ///< synthetic specification is infeasible
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. `module()` names the pipeline stage
/// that raised it so the CLI can attribute errors in its manifest.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string module, const std::string& message)
        : std::runtime_error(message), kind_(kind), module_(std::move(module)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& module() const noexcept { return module_; }

private:
    ErrorKind kind_;
    std::string module_;
};

}  // namespace eigenmarket
