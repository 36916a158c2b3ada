#pragma once

#include <stdexcept>
#include <string>

namespace ferroper {

/// Base class for all solver-side failures.
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Configuration text failed to parse or validate.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Advective time-step restriction violated.
struct CflError : SolverError {
    explicit CflError(const std::string& what) : SolverError(what) {}
};

/// Iteration cap reached without meeting the tolerance.
struct ConvergenceError : SolverError {
    explicit ConvergenceError(const std::string& what) : SolverError(what) {}
};

/// Data incompatible with a zero-mean elliptic problem.
struct CompatibilityError : SolverError {
    explicit CompatibilityError(const std::string& what) : SolverError(what) {}
};

/// Temperature left the admissible range by more than the round-off guard.
struct MaxPrincipleError : SolverError {
    explicit MaxPrincipleError(const std::string& what) : SolverError(what) {}
};

} // namespace ferroper
