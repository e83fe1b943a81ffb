#pragma once

#include "relaxflow/grid.hpp"

#include <functional>

namespace relaxflow {

using OdeRhs = std::function<void(double t, const ComplexArray& y, ComplexArray& dydt)>;

/// Adaptive Dormand-Prince 5(4) integration of y' = f(t, y) from t0 to t1.
/// Mixed error control: |err_i| <= atol + rtol * |y_i|.
ComplexArray dopri5(const OdeRhs& f, ComplexArray y, double t0, double t1, double rtol = 1e-12,
                    double atol = 1e-14);

} // namespace relaxflow
