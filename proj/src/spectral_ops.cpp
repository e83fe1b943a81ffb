#include "relaxflow/spectral_ops.hpp"

#include "relaxflow/errors.hpp"

#include <algorithm>
#include <cmath>

namespace relaxflow {

namespace {

const Complex kI(0.0, 1.0);

void require_vector(const SpectralField& v, const char* what)
{
    if (!v.is_vector()) throw ConfigError(std::string(what) + " expects a vector field");
}

void require_scalar(const SpectralField& f, const char* what)
{
    if (!f.is_scalar()) throw ConfigError(std::string(what) + " expects a scalar field");
}

} // namespace

// ============================================================================
// Transforms
// ============================================================================

SpectralField transform_forward(const Grid& grid, const std::vector<RealArray>& components)
{
    if (components.size() != 1 && components.size() != static_cast<std::size_t>(grid.dim()))
        throw ConfigError("transform_forward: expected 1 or dim components");
    SpectralField out(grid, static_cast<int>(components.size()), Parity::Real);
    const double inv_n = 1.0 / static_cast<double>(grid.size());
    ComplexArray buf(grid.size());
    for (std::size_t c = 0; c < components.size(); ++c) {
        if (components[c].size() != grid.size())
            throw ConfigError("transform_forward: sample count does not match grid");
        for (std::size_t i = 0; i < grid.size(); ++i) buf[i] = components[c][i];
        auto& dst = out[static_cast<int>(c)];
        grid.plans().forward(buf.data(), dst.data());
        for (auto& v : dst) v *= inv_n;
    }
    return out;
}

SpectralField transform_forward(const Grid& grid, const RealArray& scalar)
{
    return transform_forward(grid, std::vector<RealArray>{scalar});
}

SpectralField transform_forward_complex(const Grid& grid, const ComplexArray& scalar)
{
    if (scalar.size() != grid.size())
        throw ConfigError("transform_forward: sample count does not match grid");
    SpectralField out(grid, 1, Parity::Complex);
    grid.plans().forward(scalar.data(), out[0].data());
    const double inv_n = 1.0 / static_cast<double>(grid.size());
    for (auto& v : out[0]) v *= inv_n;
    return out;
}

ComplexArray to_physical_complex(const SpectralField& f, int component)
{
    ComplexArray out(f.grid().size());
    f.grid().plans().backward(f[component].data(), out.data());
    return out;
}

RealArray to_physical(const SpectralField& f, int component)
{
    const ComplexArray z = to_physical_complex(f, component);
    RealArray out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i].real();
    return out;
}

std::vector<RealArray> transform_inverse(const SpectralField& f)
{
    std::vector<RealArray> out;
    out.reserve(static_cast<std::size_t>(f.components()));
    for (int c = 0; c < f.components(); ++c) out.push_back(to_physical(f, c));
    return out;
}

// ============================================================================
// Differential operators
// ============================================================================

SpectralField gradient(const SpectralField& f)
{
    require_scalar(f, "gradient");
    const Grid& g = f.grid();
    SpectralField out(g, g.dim(), f.parity());
    for (int m = 0; m < g.dim(); ++m)
        for (std::size_t i = 0; i < g.size(); ++i)
            out[m][i] = kI * g.derivative_frequency(i, m) * f[0][i];
    return out;
}

SpectralField divergence(const SpectralField& v)
{
    require_vector(v, "divergence");
    const Grid& g = v.grid();
    SpectralField out(g, 1, v.parity());
    for (std::size_t i = 0; i < g.size(); ++i) {
        Complex s = 0.0;
        for (int m = 0; m < g.dim(); ++m) s += g.derivative_frequency(i, m) * v[m][i];
        out[0][i] = kI * s;
    }
    return out;
}

SpectralField laplacian(const SpectralField& f)
{
    const Grid& g = f.grid();
    SpectralField out = f;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double k2 = g.frequency_norm_sq(i);
        for (int c = 0; c < f.components(); ++c) out[c][i] *= -k2;
    }
    return out;
}

SpectralField curl2d(const SpectralField& v)
{
    require_vector(v, "curl2d");
    const Grid& g = v.grid();
    if (g.dim() != 2) throw ConfigError("curl2d requires a 2D grid");
    SpectralField out(g, 1, v.parity());
    for (std::size_t i = 0; i < g.size(); ++i)
        out[0][i] = kI * (g.derivative_frequency(i, 0) * v[1][i] - g.derivative_frequency(i, 1) * v[0][i]);
    return out;
}

// ============================================================================
// Hodge projectors
// ============================================================================

SpectralField project_leray(const SpectralField& v)
{
    require_vector(v, "project_leray");
    const Grid& g = v.grid();
    const int d = g.dim();
    SpectralField out = v;
    double xi[3];
    for (std::size_t i = 0; i < g.size(); ++i) {
        double k2 = 0.0;
        for (int m = 0; m < d; ++m) {
            xi[m] = g.derivative_frequency(i, m);
            k2 += xi[m] * xi[m];
        }
        if (k2 == 0.0) continue;
        Complex dot = 0.0;
        for (int m = 0; m < d; ++m) dot += xi[m] * v[m][i];
        dot /= k2;
        for (int m = 0; m < d; ++m) out[m][i] = v[m][i] - xi[m] * dot;
    }
    return out;
}

SpectralField project_compressible(const SpectralField& v)
{
    require_vector(v, "project_compressible");
    const Grid& g = v.grid();
    const int d = g.dim();
    SpectralField out(g, d, v.parity());
    double xi[3];
    for (std::size_t i = 0; i < g.size(); ++i) {
        double k2 = 0.0;
        for (int m = 0; m < d; ++m) {
            xi[m] = g.derivative_frequency(i, m);
            k2 += xi[m] * xi[m];
        }
        if (k2 == 0.0) continue;
        Complex dot = 0.0;
        for (int m = 0; m < d; ++m) dot += xi[m] * v[m][i];
        dot /= k2;
        for (int m = 0; m < d; ++m) out[m][i] = xi[m] * dot;
    }
    return out;
}

// ============================================================================
// Norms and products
// ============================================================================

double l2_norm(const SpectralField& f)
{
    double s = 0.0;
    for (int c = 0; c < f.components(); ++c)
        for (const auto& v : f[c]) s += std::norm(v);
    return std::sqrt(f.grid().volume() * s);
}

SpectralField product_dealiased(const Grid& grid, const RealArray& a, const RealArray& b)
{
    RealArray p(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) p[i] = a[i] * b[i];
    SpectralField out = transform_forward(grid, p);
    out.dealias();
    return out;
}

double max_abs(const RealArray& v)
{
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace relaxflow
