#include "eigenmarket/error.hpp"

namespace eigenmarket {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Io: return "io";
        case ErrorKind::Parse: return "parse";
        case ErrorKind::Integrity: return "integrity";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Parameter: return "parameter";
        case ErrorKind::Numerical: return "numerical";
        case ErrorKind::Specification: return "specification";
    }
    return "unknown";
}

}  // namespace eigenmarket
