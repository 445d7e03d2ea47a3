#include "spdemc/error.hpp"

namespace spdemc {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::invalid_argument: return "invalid_argument";
        case ErrorKind::domain: return "domain";
        case ErrorKind::configuration: return "configuration";
        case ErrorKind::numeric: return "numeric";
        case ErrorKind::stability: return "stability";
        case ErrorKind::convergence: return "convergence";
        case ErrorKind::degenerate: return "degenerate";
        case ErrorKind::io: return "io";
    }
    return "unknown";
}

}  // namespace spdemc
