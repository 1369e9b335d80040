#pragma once

#include <stdexcept>
#include <string>

namespace tailex {

/// Invalid scenario or solver configuration (bad exponents, short weight
/// vectors, unsatisfiable constraints). Raised before any computation runs.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// An estimator cannot produce a value from the given data (too few
/// exceedances, degenerate ties, threshold out of range).
class EstimationError : public std::runtime_error {
public:
    explicit EstimationError(const std::string& what) : std::runtime_error(what) {}
};

/// Fixed-point solver failed to reach tolerance within its iteration budget.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// File read/write failure.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tailex
