#pragma once

#include <stdexcept>
#include <string>

namespace relaxflow {

/// Invalid arguments, shape mismatches, malformed configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A run left the validated numerical regime (density floor, CFL, quadrature).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DensityFloorError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class CflError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace relaxflow
