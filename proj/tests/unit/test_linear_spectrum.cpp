#include "oracles.hpp"

#include "relaxflow/errors.hpp"
#include "relaxflow/linear_spectrum.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace relaxflow;

namespace {

using oracle::ode_propagator;

SymbolPoint random_point(std::mt19937_64& rng, bool vary_mu)
{
    std::uniform_real_distribution<double> U(0.0, 1.0);
    SymbolPoint p;
    p.epsilon = std::pow(10.0, -2.0 + 2.0 * U(rng));
    p.xi_norm = std::pow(10.0, -3.0 + 6.0 * U(rng));
    if (vary_mu) p.mu = std::pow(10.0, -1.0 + 2.0 * U(rng));
    return p;
}

} // namespace

TEST_CASE("symbol point validation")
{
    CHECK_THROWS_AS(eigenvalues({-1.0, 0.1}), ConfigError);
    CHECK_THROWS_AS(eigenvalues({1.0, 0.0}), ConfigError);
    CHECK_THROWS_AS(eigenvalues({1.0, 1.5}), ConfigError);
    CHECK_THROWS_AS(eigenvalues({1.0, 0.1, 0.0}), ConfigError);
    CHECK_THROWS_AS(eigenvalues({1.0, 0.1, 1.0, 1}), ConfigError);
}

TEST_CASE("eigenvalues at zero frequency")
{
    for (double eps : {1.0, 0.3, 0.01}) {
        const SymbolEigenSet s = eigenvalues({0.0, eps});
        CHECK(s.lambda0 == Complex(-1.0 / (eps * eps)));
        CHECK(s.lambda1 == Complex(0.0));
        CHECK(std::abs(s.lambda2 - Complex(-1.0 / (eps * eps))) <= 1e-15 / (eps * eps));
        CHECK(s.lambda3 == Complex(0.0));
        CHECK(std::abs(s.lambda4 + 1.0 + 1.0 / (eps * eps)) <= 1e-15 / (eps * eps));
    }
}

TEST_CASE("eigenvalue closed forms")
{
    const SymbolEigenSet d = eigenvalues({1.0, 0.5});
    CHECK(d.lambda1 == Complex(-2.0));
    CHECK(d.lambda2 == Complex(-2.0));

    const SymbolEigenSet q = eigenvalues({1.0, 1.0, 1.0});
    CHECK(std::abs(q.lambda3 - Complex((-3.0 + std::sqrt(5.0)) / 2.0)) < 1e-15);
    CHECK(std::abs(q.lambda4 - Complex((-3.0 - std::sqrt(5.0)) / 2.0)) < 1e-15);

    // Complex pair: slow root carries Im >= 0 and the real part is -1/(2 eps^2).
    const SymbolEigenSet c = eigenvalues({10.0, 0.1});
    CHECK(c.lambda1.real() == doctest::Approx(-50.0).epsilon(1e-15));
    CHECK(c.lambda1.imag() > 0.0);
    CHECK(c.lambda2 == std::conj(c.lambda1));
}

TEST_CASE("Vieta relations, stability and branch order")
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 10000; ++i) {
        const SymbolPoint p = random_point(rng, true);
        const SymbolEigenSet s = eigenvalues(p);
        const double e2 = p.epsilon * p.epsilon, x2 = p.xi_norm * p.xi_norm;
        const double b2 = 1.0 / e2 + 1.0 + p.mu * x2;
        CHECK(std::abs(s.lambda1 + s.lambda2 + 1.0 / e2) <= 1e-10 / e2);
        CHECK(std::abs(s.lambda1 * s.lambda2 - x2 / e2) <= 1e-10 * x2 / e2);
        CHECK(std::abs(s.lambda3 + s.lambda4 + b2) <= 1e-10 * b2);
        CHECK(std::abs(s.lambda3 * s.lambda4 - p.mu * x2 / e2) <= 1e-10 * p.mu * x2 / e2);
        for (Complex l : {s.lambda0, s.lambda1, s.lambda2, s.lambda3, s.lambda4}) CHECK(l.real() <= 0.0);
        CHECK(std::abs(s.lambda1.real()) <= std::abs(s.lambda2.real()));
        CHECK(std::abs(s.lambda3.real()) <= std::abs(s.lambda4.real()));
        CHECK(s.lambda1.imag() >= 0.0);
    }
}

TEST_CASE("characteristic polynomial residuals")
{
    std::mt19937_64 rng(9);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const SymbolPoint p = random_point(rng, false);
        const SymbolEigenSet s = eigenvalues(p);
        worst = std::max({worst, char_poly_residual(p, Block::B1, s.lambda1), char_poly_residual(p, Block::B1, s.lambda2),
                          char_poly_residual(p, Block::B2, s.lambda3), char_poly_residual(p, Block::B2, s.lambda4)});
    }
    CHECK(worst <= 1e-10);
    // A non-root is flagged.
    CHECK(char_poly_residual({1.0, 0.1}, Block::B1, -2.0) > 1.0);
}

TEST_CASE("asymptotic expansions")
{
    {
        const SymbolPoint p{0.5, 0.1};
        const SymbolEigenSet e = eigenvalues(p), a = asymptotic_eigenvalues(p, Regime::Low);
        CHECK(std::abs(e.lambda1 - a.lambda1) <= 2.0 * 0.01 * std::pow(0.5, 4));
    }
    {
        const SymbolPoint p{100.0, 0.1};
        const SymbolEigenSet e = eigenvalues(p), a = asymptotic_eigenvalues(p, Regime::High);
        const double bound = 2.0 * std::pow(0.1, -3) / 100.0;
        CHECK(std::abs(e.lambda1.real() + 0.5 / 0.01) <= bound);
        CHECK(std::abs(e.lambda1.imag() - 100.0 / 0.1) <= bound);
        CHECK(std::abs(e.lambda1 - a.lambda1) <= 2.0 * bound);
    }
    {
        const SymbolPoint p{0.0, 0.2};
        const SymbolEigenSet e = eigenvalues(p), a = asymptotic_eigenvalues(p, Regime::Low);
        CHECK(std::abs(e.lambda1 - a.lambda1) == 0.0);
        CHECK(std::abs(e.lambda3 - a.lambda3) == 0.0);
        CHECK(std::abs(e.lambda4 - a.lambda4) <= 1e-14 * std::abs(a.lambda4));
        CHECK(std::abs(e.lambda2 - a.lambda2) <= 1e-14 * std::abs(a.lambda2));
    }
    CHECK_THROWS_AS(asymptotic_eigenvalues({3.0, 0.1}, Regime::Low), ConfigError);
    CHECK_THROWS_AS(asymptotic_eigenvalues({3.0, 0.1}, Regime::High), ConfigError);
}

TEST_CASE("frequency partition picture")
{
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double eps = std::pow(10.0, -2.0 + 2.0 * U(rng));
        const double t = std::pow(10.0, -3.0 + 4.0 * U(rng));
        const double xl = 0.25 / eps * U(rng);
        const Complex l1 = eigenvalues({xl, eps}).lambda1;
        CHECK(std::exp(l1.real() * t) >= std::exp(-2.0 * xl * xl * t) * (1.0 - 1e-14));
        const double xh = 4.0 / eps * (1.0 + 100.0 * U(rng));
        const Complex h1 = eigenvalues({xh, eps}).lambda1;
        CHECK(std::exp(h1.real() * t) <= std::exp(-t / (4.0 * eps * eps)));
    }
}

TEST_CASE("phi functions")
{
    for (Complex z : {Complex(2.0), Complex(1e-3), Complex(-30.0), Complex(0.3, 2.0), Complex(-1e-9)}) {
        CHECK(std::abs(phi(0, z) - std::exp(z)) <= 1e-15 * std::abs(std::exp(z)) + 1e-300);
        const Complex p1 = std::abs(z) > 1e-4 ? (std::exp(z) - 1.0) / z : 1.0 + z / 2.0;
        CHECK(std::abs(phi(1, z) - p1) <= 1e-12 * std::abs(p1));
        // phi_{k+1} = (phi_k - 1/k!)/z
        if (std::abs(z) > 0.5) {
            CHECK(std::abs(phi(2, z) - (phi(1, z) - 1.0) / z) <= 1e-13 * std::abs(phi(2, z)));
            CHECK(std::abs(phi(3, z) - (phi(2, z) - 0.5) / z) <= 1e-12 * std::abs(phi(3, z)));
        }
    }
    CHECK(phi(2, 0.0) == Complex(0.5));
    CHECK(std::abs(phi(3, 0.0) - 1.0 / 6.0) < 1e-16);
}

TEST_CASE("matrix phi functions")
{
    const Mat2 D{{Complex(-2.0), 0.0, 0.0, Complex(-0.5)}};
    const Mat2 fD = phi_matrix(D, 1);
    CHECK(std::abs(fD(0, 0) - phi(1, -2.0)) < 1e-15);
    CHECK(std::abs(fD(1, 1) - phi(1, -0.5)) < 1e-15);
    CHECK(std::abs(fD(0, 1)) < 1e-16);

    // Jordan block: f(J) = [[f, f'], [0, f]].
    const Complex z(-1.3);
    const Mat2 J{{z, 1.0, 0.0, z}};
    const Mat2 eJ = phi_matrix(J, 0);
    CHECK(std::abs(eJ(0, 0) - std::exp(z)) < 1e-15);
    CHECK(std::abs(eJ(0, 1) - std::exp(z)) < 1e-14);
    const Mat2 p1 = phi_matrix(J, 1);
    CHECK(std::abs(p1(0, 1) - (phi(1, z) - phi(2, z))) < 1e-14);

    const Mat2 A{{1.0, 2.0, 3.0, 4.0}};
    const Mat2 I = Mat2::identity();
    CHECK(max_abs_diff(A * I, A) == 0.0);
    CHECK(A.trace() == Complex(5.0));
    CHECK(A.det() == Complex(-2.0));
    CHECK(max_abs_diff(A + A, Complex(2.0) * A) == 0.0);
}

TEST_CASE("propagators: identity, zero frequency and semigroup")
{
    for (double eps : {0.5, 0.1}) {
        const SymbolPoint p{2.0, eps, 1.3};
        CHECK(max_abs_diff(propagator_B1(p, 0.0), Mat2::identity()) <= 1e-15);
        CHECK(max_abs_diff(propagator_B2(p, 0.0), Mat2::identity()) <= 1e-15);

        const double t = 0.7 * eps * eps;
        const Mat2 G1 = propagator_B1({0.0, eps}, t);
        CHECK(max_abs_diff(G1, Mat2{{1.0, 0.0, 0.0, std::exp(-t / (eps * eps))}}) <= 1e-15);

        // B2(0) = v v^T with |v|^2 = 1/eps^2 + 1.
        const double v2 = 1.0 / (eps * eps) + 1.0;
        const Mat2 M = symbol_B2({0.0, eps});
        const Mat2 ref = Mat2::identity() + Complex((std::exp(-t * v2) - 1.0) / v2) * M;
        CHECK(max_abs_diff(propagator_B2({0.0, eps}, t), ref) <= 1e-14);

        const double s = 0.3 * eps * eps;
        CHECK(max_abs_diff(propagator_B1(p, t + s), propagator_B1(p, t) * propagator_B1(p, s)) <= 1e-9);
        CHECK(max_abs_diff(propagator_B2(p, t + s), propagator_B2(p, t) * propagator_B2(p, s)) <= 1e-9);
    }
}

TEST_CASE("propagators match the ODE oracle")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<SymbolPoint> pts{{1.0, 0.5}, {1.0 / 0.2, 0.1}, {0.5 * (1.0 + 1e-9) / 0.1, 0.1}, {25.0, 0.02, 3.0}};
    for (int i = 0; i < 40; ++i) {
        SymbolPoint p;
        p.epsilon = std::pow(10.0, -1.5 + 1.5 * U(rng));
        p.xi_norm = std::pow(10.0, -2.0 + 4.0 * U(rng));
        p.mu = std::pow(10.0, -1.0 + 2.0 * U(rng));
        pts.push_back(p);
    }
    for (const SymbolPoint& p : pts) {
        for (double tscale : {0.1, 1.0, 3.0}) {
            const double t = tscale * p.epsilon * p.epsilon;
            CHECK(max_abs_diff(propagator_B1(p, t), ode_propagator(symbol_B1(p), t)) <= 1e-8);
            CHECK(max_abs_diff(propagator_B2(p, t), ode_propagator(symbol_B2(p), t)) <= 1e-8);
        }
    }
}
