#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace afslab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Base class for all afslab errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid user input: bad parameters, malformed specs, mismatched shapes.
struct ConfigError : Error {
    using Error::Error;
};

/// Numeric failure during computation (degenerate rotation, empty AFS, ...).
struct NumericError : Error {
    using Error::Error;
};

struct DegenerateRotationError : NumericError {
    using NumericError::NumericError;
};

struct EmptyAfsError : NumericError {
    using NumericError::NumericError;
};

struct ComponentCollapseError : NumericError {
    using NumericError::NumericError;
};

}  // namespace afslab
