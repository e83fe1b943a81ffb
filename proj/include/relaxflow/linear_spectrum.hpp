#pragma once

#include "relaxflow/grid.hpp"

#include <array>
#include <utility>

namespace relaxflow {

/// One frequency sample of the linearized symbols.
struct SymbolPoint {
    double xi_norm = 0.0;
    double epsilon = 0.1;
    double mu = 1.0;
    int d = 2;

    /// Throws ConfigError unless xi >= 0, 0 < epsilon <= 1, mu > 0, d >= 2.
    void validate() const;
};

/// Eigenvalues of -B1 (lambda0..lambda2) and -B2 (lambda3, lambda4).
/// lambda0 = -1/eps^2 has multiplicity d-1; lambda3 and lambda4 multiplicity d.
/// lambda1 / lambda3 are the roots of smaller |Re| (ties: Im >= 0).
struct SymbolEigenSet {
    Complex lambda0;
    Complex lambda1;
    Complex lambda2;
    Complex lambda3;
    Complex lambda4;
};

enum class Block { B1, B2 };

/// |p(lambda)| / max(1, |lambda|^2) for the characteristic polynomial of the
/// block, evaluated in extended precision so only the root error is measured.
double char_poly_residual(const SymbolPoint& p, Block block, Complex lambda);

/// Dense 2x2 complex matrix, row-major: [[m[0], m[1]], [m[2], m[3]]].
struct Mat2 {
    std::array<Complex, 4> m{};

    static Mat2 identity() { return Mat2{{1.0, 0.0, 0.0, 1.0}}; }
    Complex operator()(int r, int c) const { return m[static_cast<std::size_t>(2 * r + c)]; }
    Complex trace() const { return m[0] + m[3]; }
    Complex det() const { return m[0] * m[3] - m[1] * m[2]; }
    /// (y0, y1) = M (x0, x1)
    std::pair<Complex, Complex> apply(Complex x0, Complex x1) const
    {
        return {m[0] * x0 + m[1] * x1, m[2] * x0 + m[3] * x1};
    }
};

Mat2 operator*(const Mat2& a, const Mat2& b);
Mat2 operator+(const Mat2& a, const Mat2& b);
Mat2 operator*(Complex s, const Mat2& a);
double max_abs_diff(const Mat2& a, const Mat2& b);

/// B1 on (a, xi_hat . w): [[0, i|xi|/eps], [i|xi|/eps, 1/eps^2]].
Mat2 symbol_B1(const SymbolPoint& p);
/// B2 on (P w, u), one Cartesian component: [[1/eps^2, -1/eps], [-1/eps, 1 + mu|xi|^2]].
Mat2 symbol_B2(const SymbolPoint& p);

SymbolEigenSet eigenvalues(const SymbolPoint& p);

enum class Regime { Low, High };

/// Leading-order expansions. Low needs eps|xi| <= 1/4, High needs eps|xi| >= 4;
/// otherwise ConfigError.
SymbolEigenSet asymptotic_eigenvalues(const SymbolPoint& p, Regime regime);

/// Roots of z^2 + b z + c = 0 without cancellation; first root has the larger modulus.
std::pair<Complex, Complex> quadratic_roots(Complex b, Complex c);

/// phi_0(z) = e^z, phi_{k+1}(z) = (phi_k(z) - 1/k!)/z, k in [0, 3].
Complex phi(int k, Complex z);

/// phi_k(Z) for a 2x2 matrix: f(Z) = f(z2) I + f[z1, z2] (Z - z2 I) over the
/// eigenvalues z1, z2 of Z. Close eigenvalues (|z1 - z2| < 1/2, the Jordan
/// case included) take the divided difference as the mean of f' on the
/// segment by Gauss-Legendre quadrature.
Mat2 phi_matrix(const Mat2& Z, int k);

/// e^{-t B1(xi)}.
Mat2 propagator_B1(const SymbolPoint& p, double t);
/// e^{-t B2(xi)}.
Mat2 propagator_B2(const SymbolPoint& p, double t);

} // namespace relaxflow
