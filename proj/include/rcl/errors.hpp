#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rcl {

/// Bad numeric argument or precondition violation (maps to CLI exit 2).
class invalid_argument_error : public std::invalid_argument {
public:
    explicit invalid_argument_error(const std::string& what)
        : std::invalid_argument(what) {}
};

/// Operation not defined in this ambient dimension.
class unsupported_dimension_error : public invalid_argument_error {
public:
    explicit unsupported_dimension_error(const std::string& what)
        : invalid_argument_error(what) {}
};

/// Body has an affine hull of dimension < N where a full-dimensional one is required.
class degenerate_body_error : public invalid_argument_error {
public:
    explicit degenerate_body_error(const std::string& what)
        : invalid_argument_error(what) {}
};

/// Two sample points coincide; the interaction kernel is undefined.
class duplicate_point_error : public invalid_argument_error {
public:
    explicit duplicate_point_error(const std::string& what)
        : invalid_argument_error(what) {}
};

/// Malformed body specification or run configuration (maps to CLI exit 2).
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Equilibrium solver did not reach the KKT tolerance within its iteration
/// budget. Carries the best iterate and its residual (maps to CLI exit 3).
class solver_failure : public std::runtime_error {
public:
    solver_failure(const std::string& what, double residual,
                   Eigen::VectorXd best_masses, long iterations)
        : std::runtime_error(what),
          residual(residual),
          best_masses(std::move(best_masses)),
          iterations(iterations) {}

    double residual;
    Eigen::VectorXd best_masses;
    long iterations;
};

}  // namespace rcl
