#ifndef ROUGHMANIFOLD_ERRORS_HPP
#define ROUGHMANIFOLD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace roughmanifold {

/// Bad arguments or malformed configuration (CLI exit code 2).
struct UsageError : std::invalid_argument {
    explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

/// Precondition failures on otherwise well-formed inputs: dimension mismatch,
/// off-grid times, membership violations, chart misses (CLI exit code 3).
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure during iteration: sewing divergence, RDE explosion,
/// Newton basin escape (CLI exit code 4). Carries the first bad location.
struct NumericError : std::runtime_error {
    double where_s = 0.0;
    double where_t = 0.0;
    NumericError(const std::string& what, double s, double t)
        : std::runtime_error(what), where_s(s), where_t(t) {}
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace roughmanifold

#endif
