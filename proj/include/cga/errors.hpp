#pragma once

#include <stdexcept>
#include <string>

namespace cga {

// Config file / schema problems. Message names the offending key.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// RBF interpolation system is singular or ill-conditioned.
struct FitError : std::runtime_error {
    explicit FitError(const std::string& msg) : std::runtime_error(msg) {}
};

// Missing Dirichlet data / rank-deficient system.
struct IllPosedError : std::runtime_error {
    explicit IllPosedError(const std::string& msg) : std::runtime_error(msg) {}
};

// Linear solver failed or did not reach the required residual.
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cga
