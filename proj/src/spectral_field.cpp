#include "relaxflow/spectral_field.hpp"

#include "relaxflow/errors.hpp"

#include <algorithm>
#include <cmath>

namespace relaxflow {

SpectralField::SpectralField(const Grid& grid, int components, Parity parity)
    : grid_(grid), parity_(parity)
{
    if (components != 1 && components != grid.dim())
        throw ConfigError("a field has 1 or dim components");
    comps_.assign(static_cast<std::size_t>(components), ComplexArray(grid.size()));
}

SpectralField SpectralField::component(int c) const
{
    SpectralField s(grid_, 1, parity_);
    s.comps_[0] = comps_.at(static_cast<std::size_t>(c));
    return s;
}

void SpectralField::set_component(int c, const SpectralField& scalar)
{
    if (!scalar.is_scalar() || scalar.grid() != grid_)
        throw ConfigError("set_component expects a scalar field on the same grid");
    comps_.at(static_cast<std::size_t>(c)) = scalar.comps_[0];
}

void SpectralField::check_compatible(const SpectralField& o) const
{
    if (o.grid_ != grid_ || o.comps_.size() != comps_.size())
        throw ConfigError("field shape mismatch");
}

SpectralField& SpectralField::operator+=(const SpectralField& o)
{
    check_compatible(o);
    for (std::size_t c = 0; c < comps_.size(); ++c)
        for (std::size_t i = 0; i < comps_[c].size(); ++i) comps_[c][i] += o.comps_[c][i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o)
{
    check_compatible(o);
    for (std::size_t c = 0; c < comps_.size(); ++c)
        for (std::size_t i = 0; i < comps_[c].size(); ++i) comps_[c][i] -= o.comps_[c][i];
    return *this;
}

SpectralField& SpectralField::operator*=(double s)
{
    for (auto& comp : comps_)
        for (auto& v : comp) v *= s;
    return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& o)
{
    check_compatible(o);
    for (std::size_t c = 0; c < comps_.size(); ++c)
        for (std::size_t i = 0; i < comps_[c].size(); ++i) comps_[c][i] += s * o.comps_[c][i];
    return *this;
}

void SpectralField::dealias()
{
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        if (grid_.dealiased_keep(i)) continue;
        for (auto& comp : comps_) comp[i] = 0.0;
    }
}

void SpectralField::symmetrize()
{
    if (parity_ != Parity::Real) return;
    for (auto& comp : comps_) {
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            const std::size_t j = grid_.mirror(i);
            if (j < i) continue;
            if (j == i) {
                comp[i] = comp[i].real();
                continue;
            }
            const Complex avg = 0.5 * (comp[i] + std::conj(comp[j]));
            comp[i] = avg;
            comp[j] = std::conj(avg);
        }
    }
}

double SpectralField::hermitian_defect() const
{
    const double scale = max_abs();
    if (scale == 0.0) return 0.0;
    double worst = 0.0;
    for (const auto& comp : comps_)
        for (std::size_t i = 0; i < grid_.size(); ++i)
            worst = std::max(worst, std::abs(comp[grid_.mirror(i)] - std::conj(comp[i])));
    return worst / scale;
}

double SpectralField::max_abs() const
{
    double m = 0.0;
    for (const auto& comp : comps_)
        for (const auto& v : comp) m = std::max(m, std::abs(v));
    return m;
}

void SpectralField::set_zero()
{
    for (auto& comp : comps_) std::fill(comp.begin(), comp.end(), Complex(0.0));
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

double max_abs_diff(const SpectralField& a, const SpectralField& b)
{
    if (a.grid() != b.grid() || a.components() != b.components())
        throw ConfigError("field shape mismatch");
    double m = 0.0;
    for (int c = 0; c < a.components(); ++c)
        for (std::size_t i = 0; i < a.grid().size(); ++i)
            m = std::max(m, std::abs(a[c][i] - b[c][i]));
    return m;
}

} // namespace relaxflow
