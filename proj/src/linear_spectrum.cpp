#include "relaxflow/linear_spectrum.hpp"

#include "relaxflow/errors.hpp"

#include <algorithm>
#include <cmath>

namespace relaxflow {

namespace {

constexpr double kSplitGap = 0.5;

// 8-point Gauss-Legendre on [0, 1].
constexpr std::array<double, 8> kGlNodes = {
    0.019855071751231856, 0.10166676129318664, 0.2372337950418355, 0.4082826787521751,
    0.5917173212478249,   0.7627662049581645,  0.8983332387068134, 0.9801449282487681};
constexpr std::array<double, 8> kGlWeights = {
    0.05061426814518813, 0.11119051722668724, 0.15685332293894363, 0.18134189168918100,
    0.18134189168918100, 0.15685332293894363, 0.11119051722668724, 0.05061426814518813};

double factorial(int k)
{
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

Complex phi_series(int k, Complex z)
{
    Complex term = 1.0 / factorial(k);
    Complex sum = term;
    for (int j = 1; j < 60; ++j) {
        term *= z / static_cast<double>(j + k);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

// d/dz phi_k = phi_k - k phi_{k+1}
Complex phi_prime(int k, Complex z) { return k == 0 ? std::exp(z) : phi(k, z) - static_cast<double>(k) * phi(k + 1, z); }

// Real roots of l^2 + b l + c (b > 0, b^2 >= 4c), slow root first. Extended
// precision keeps the rounded roots within half an ulp.
std::pair<Complex, Complex> real_roots_slow_first(long double b, long double c)
{
    const long double disc = std::max(0.0L, b * b - 4.0L * c);
    const long double fast = -0.5L * (b + std::sqrt(disc));
    const long double slow = fast == 0.0L ? 0.0L : c / fast;
    return {Complex(static_cast<double>(slow)), Complex(static_cast<double>(fast))};
}

} // namespace

void SymbolPoint::validate() const
{
    if (!(xi_norm >= 0.0) || !std::isfinite(xi_norm)) throw ConfigError("|xi| must be finite and >= 0");
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must lie in (0, 1]");
    if (!(mu > 0.0) || !std::isfinite(mu)) throw ConfigError("mu must be finite and > 0");
    if (d < 2) throw ConfigError("dimension must be >= 2");
}

Mat2 operator*(const Mat2& a, const Mat2& b)
{
    return Mat2{{a.m[0] * b.m[0] + a.m[1] * b.m[2], a.m[0] * b.m[1] + a.m[1] * b.m[3],
                 a.m[2] * b.m[0] + a.m[3] * b.m[2], a.m[2] * b.m[1] + a.m[3] * b.m[3]}};
}

Mat2 operator+(const Mat2& a, const Mat2& b)
{
    Mat2 r;
    for (std::size_t i = 0; i < 4; ++i) r.m[i] = a.m[i] + b.m[i];
    return r;
}

Mat2 operator*(Complex s, const Mat2& a)
{
    Mat2 r;
    for (std::size_t i = 0; i < 4; ++i) r.m[i] = s * a.m[i];
    return r;
}

double max_abs_diff(const Mat2& a, const Mat2& b)
{
    double d = 0.0;
    for (std::size_t i = 0; i < 4; ++i) d = std::max(d, std::abs(a.m[i] - b.m[i]));
    return d;
}

Mat2 symbol_B1(const SymbolPoint& p)
{
    const Complex off(0.0, p.xi_norm / p.epsilon);
    return Mat2{{0.0, off, off, 1.0 / (p.epsilon * p.epsilon)}};
}

Mat2 symbol_B2(const SymbolPoint& p)
{
    const double e = p.epsilon;
    return Mat2{{1.0 / (e * e), -1.0 / e, -1.0 / e, 1.0 + p.mu * p.xi_norm * p.xi_norm}};
}

std::pair<Complex, Complex> quadratic_roots(Complex b, Complex c)
{
    const Complex s = std::sqrt(b * b - 4.0 * c);
    const Complex q = -0.5 * (std::real(std::conj(b) * s) >= 0.0 ? b + s : b - s);
    if (q == Complex(0.0)) return {0.0, 0.0};
    return {q, c / q};
}

SymbolEigenSet eigenvalues(const SymbolPoint& p)
{
    p.validate();
    const double e2 = p.epsilon * p.epsilon;
    const long double le2 = static_cast<long double>(p.epsilon) * p.epsilon;
    const long double lx2 = static_cast<long double>(p.xi_norm) * p.xi_norm;
    SymbolEigenSet s;
    s.lambda0 = -1.0 / e2;
    if (4.0L * le2 * lx2 < 1.0L) {
        std::tie(s.lambda1, s.lambda2) = real_roots_slow_first(1.0L / le2, lx2 / le2);
    } else {
        // Complex pair: the real part is exactly -1/(2 eps^2).
        const double re = -0.5 / e2;
        const double im = static_cast<double>(0.5L * std::sqrt(4.0L * le2 * lx2 - 1.0L) / le2);
        s.lambda1 = {re, im};
        s.lambda2 = {re, -im};
    }
    // The B2 discriminant (1/eps^2 - mu xi^2)^2 + 2(1/eps^2 + mu xi^2) + 1 is positive.
    std::tie(s.lambda3, s.lambda4) = real_roots_slow_first(1.0L / le2 + 1.0L + p.mu * lx2, p.mu * lx2 / le2);
    return s;
}

double char_poly_residual(const SymbolPoint& p, Block block, Complex lambda)
{
    using LC = std::complex<long double>;
    const long double e2 = static_cast<long double>(p.epsilon) * p.epsilon;
    const long double x2 = static_cast<long double>(p.xi_norm) * p.xi_norm;
    const LC l(lambda.real(), lambda.imag());
    const LC r = block == Block::B1 ? l * l + l / e2 + x2 / e2
                                    : l * l + (1.0L / e2 + 1.0L + p.mu * x2) * l + p.mu * x2 / e2;
    return static_cast<double>(std::abs(r) / std::max(1.0L, std::norm(l)));
}

SymbolEigenSet asymptotic_eigenvalues(const SymbolPoint& p, Regime regime)
{
    p.validate();
    const double e = p.epsilon, e2 = e * e;
    const double x = p.xi_norm, x2 = x * x;
    SymbolEigenSet s;
    s.lambda0 = -1.0 / e2;
    if (regime == Regime::Low) {
        if (e * x > 0.25) throw ConfigError("low-frequency expansion needs eps*|xi| <= 1/4");
        s.lambda1 = -x2;
        s.lambda2 = -1.0 / e2 + x2;
        s.lambda3 = -p.mu * x2 / (1.0 + e2);
        s.lambda4 = -(1.0 + 1.0 / e2) - p.mu * e2 / (1.0 + e2) * x2;
    } else {
        if (e * x < 4.0) throw ConfigError("high-frequency expansion needs eps*|xi| >= 4");
        s.lambda1 = {-0.5 / e2, x / e};
        s.lambda2 = {-0.5 / e2, -x / e};
        s.lambda3 = -1.0 / e2;
        s.lambda4 = -1.0 - p.mu * x2;
    }
    return s;
}

Complex phi(int k, Complex z)
{
    if (k < 0 || k > 4) throw ConfigError("phi index out of range");
    if (std::abs(z) < 1.0) return phi_series(k, z);
    Complex v = std::exp(z);
    for (int j = 0; j < k; ++j) v = (v - 1.0 / factorial(j)) / z;
    return v;
}

Mat2 phi_matrix(const Mat2& Z, int k)
{
    const auto [z1, z2] = quadratic_roots(-Z.trace(), Z.det());
    const Complex f2 = phi(k, z2);
    Complex dd;
    if (std::abs(z1 - z2) >= kSplitGap) {
        dd = (phi(k, z1) - f2) / (z1 - z2);
    } else {
        dd = 0.0;
        for (std::size_t i = 0; i < kGlNodes.size(); ++i)
            dd += kGlWeights[i] * phi_prime(k, z2 + kGlNodes[i] * (z1 - z2));
    }
    Mat2 shifted = Z;
    shifted.m[0] -= z2;
    shifted.m[3] -= z2;
    return f2 * Mat2::identity() + dd * shifted;
}

Mat2 propagator_B1(const SymbolPoint& p, double t)
{
    p.validate();
    return phi_matrix(Complex(-t) * symbol_B1(p), 0);
}

Mat2 propagator_B2(const SymbolPoint& p, double t)
{
    p.validate();
    return phi_matrix(Complex(-t) * symbol_B2(p), 0);
}

} // namespace relaxflow
