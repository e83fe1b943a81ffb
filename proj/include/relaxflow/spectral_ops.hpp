#pragma once

#include "relaxflow/spectral_field.hpp"

#include <vector>

namespace relaxflow {

/// Physical samples -> coefficients. One RealArray per component, each of
/// grid.size() samples in row-major order (last axis fastest).
SpectralField transform_forward(const Grid& grid, const std::vector<RealArray>& components);
SpectralField transform_forward(const Grid& grid, const RealArray& scalar);
/// Complex-valued samples; the result carries Parity::Complex.
SpectralField transform_forward_complex(const Grid& grid, const ComplexArray& scalar);

/// Coefficients -> physical samples (real part; Real parity assumed).
std::vector<RealArray> transform_inverse(const SpectralField& f);
RealArray to_physical(const SpectralField& f, int component = 0);
ComplexArray to_physical_complex(const SpectralField& f, int component = 0);

/// Mode k of component m is i*xi_m*f(k). Odd derivatives drop the Nyquist index.
SpectralField gradient(const SpectralField& f);
/// sum_m i*xi_m*v_m(k).
SpectralField divergence(const SpectralField& v);
/// Multiplies every mode by -|xi|^2 (componentwise for vectors).
SpectralField laplacian(const SpectralField& f);
/// Scalar vorticity d1 v2 - d2 v1 (2D only).
SpectralField curl2d(const SpectralField& v);

/// Per mode k != 0: Id - xi xi^T/|xi|^2 using derivative frequencies.
/// Modes with zero derivative frequency (the mean) pass through.
SpectralField project_leray(const SpectralField& v);
/// Id - P per mode, so project_leray(v) + project_compressible(v) == v.
SpectralField project_compressible(const SpectralField& v);

/// Torus L2 norm via Parseval: sqrt(L^d * sum |c_k|^2) summed over components.
double l2_norm(const SpectralField& f);

/// Pointwise product of two physical arrays transformed back and dealiased.
SpectralField product_dealiased(const Grid& grid, const RealArray& a, const RealArray& b);

double max_abs(const RealArray& v);

} // namespace relaxflow
