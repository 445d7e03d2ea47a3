#pragma once

#include <stdexcept>
#include <string>

namespace spdemc {

enum class ErrorKind {
    invalid_argument,
    domain,         // input outside the mathematical domain of an operation
    configuration,  // inconsistent grid / schedule / experiment setup
    numeric,        // non-finite values
    stability,      // a stability limit that the caller asked to enforce
    convergence,    // adaptive procedure exhausted its budget
    degenerate,     // e.g. zero-denominator tranche spread
    io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

inline void require(bool condition, ErrorKind kind, const char* what) {
    if (!condition) fail(kind, what);
}

}  // namespace spdemc
