#pragma once

#include <span>

namespace relaxflow {

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    /// Standard error of the slope (0 for two points).
    double stderr_slope = 0.0;
    int points = 0;
};

/// Ordinary least squares of log y against log x. Needs at least two
/// positive pairs; ConfigError otherwise.
SlopeFit fit_slope(std::span<const double> x, std::span<const double> y);

} // namespace relaxflow
