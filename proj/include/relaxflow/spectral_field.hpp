#pragma once

#include "relaxflow/grid.hpp"

#include <vector>

namespace relaxflow {

/// Whether the physical-space counterpart is real-valued (coefficients are
/// then Hermitian: c(-k) = conj(c(k))).
enum class Parity { Real, Complex };

/// Fourier-coefficient representation of a scalar (1 component) or vector
/// (dim components) field on the torus. Coefficients follow the normalization
/// documented on Grid.
class SpectralField {
public:
    SpectralField(const Grid& grid, int components, Parity parity = Parity::Real);

    static SpectralField scalar(const Grid& grid) { return SpectralField(grid, 1); }
    static SpectralField vector(const Grid& grid) { return SpectralField(grid, grid.dim()); }

    const Grid& grid() const { return grid_; }
    int components() const { return static_cast<int>(comps_.size()); }
    bool is_scalar() const { return comps_.size() == 1; }
    bool is_vector() const { return components() == grid_.dim(); }
    Parity parity() const { return parity_; }
    void set_parity(Parity p) { parity_ = p; }

    ComplexArray& operator[](int c) { return comps_[static_cast<std::size_t>(c)]; }
    const ComplexArray& operator[](int c) const { return comps_[static_cast<std::size_t>(c)]; }

    /// Single component as a scalar field.
    SpectralField component(int c) const;
    void set_component(int c, const SpectralField& scalar);

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double s);
    /// this += s * o
    SpectralField& axpy(double s, const SpectralField& o);

    /// Zero every mode removed by the 2/3 rule (Nyquist included).
    void dealias();
    /// Enforce c(-k) = conj(c(k)) by averaging mirror pairs. No-op for Complex parity.
    void symmetrize();
    /// max_k |c(-k) - conj(c(k))| / max_k |c(k)|, 0 for a zero field.
    double hermitian_defect() const;

    double max_abs() const;
    void set_zero();

private:
    void check_compatible(const SpectralField& o) const;

    Grid grid_;
    std::vector<ComplexArray> comps_;
    Parity parity_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// Largest coefficient-wise difference max|a - b| over all components.
double max_abs_diff(const SpectralField& a, const SpectralField& b);

} // namespace relaxflow
