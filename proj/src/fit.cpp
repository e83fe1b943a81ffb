#include "relaxflow/fit.hpp"

#include "relaxflow/errors.hpp"

#include <cmath>
#include <vector>

namespace relaxflow {

SlopeFit fit_slope(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) throw ConfigError("fit_slope: x and y lengths differ");
    if (x.size() < 2) throw ConfigError("fit_slope: need at least two points");
    const std::size_t n = x.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ConfigError("fit_slope: values must be positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw ConfigError("fit_slope: x values must not all coincide");
    SlopeFit f;
    f.points = static_cast<int>(n);
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - (f.intercept + f.slope * lx[i]);
        sse += r * r;
    }
    f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    f.stderr_slope = n > 2 ? std::sqrt(sse / (n - 2) / sxx) : 0.0;
    return f;
}

} // namespace relaxflow
