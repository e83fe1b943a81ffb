#include "oracles.hpp"

#include "relaxflow/errors.hpp"
#include "relaxflow/linear_spectrum.hpp"
#include "relaxflow/models.hpp"

#include <doctest.h>

using namespace relaxflow;

namespace {

const double kL = 2.0 * M_PI;

EnsState random_state(const Grid& g, std::uint64_t seed, double eps, double peak = 0.05, double kc = 3.0)
{
    EnsState s = EnsState::zero(g, eps, 1.0);
    s.a = oracle::random_field(g, 1, seed, peak, kc);
    s.w = oracle::random_field(g, 2, seed + 1, peak, kc);
    s.u = project_leray(oracle::random_field(g, 2, seed + 2, peak, kc));
    return s;
}

KsnsState random_limit(const Grid& g, std::uint64_t seed, double peak = 0.05, double kc = 3.0)
{
    KsnsState s = KsnsState::zero(g, 1.0);
    s.a = oracle::random_field(g, 1, seed, peak, kc);
    s.u = project_leray(oracle::random_field(g, 2, seed + 1, peak, kc));
    return s;
}

// x1 -> -x1 with the first vector component negated.
SpectralField reflect(const SpectralField& f)
{
    const Grid& g = f.grid();
    SpectralField out(g, f.components());
    int k[2];
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.wavenumbers(i, k);
        const int r[2] = {-k[0], k[1]};
        const std::size_t j = g.flat_index(r);
        for (int c = 0; c < f.components(); ++c) out[c][j] = (f.is_vector() && c == 0 ? -1.0 : 1.0) * f[c][i];
    }
    return out;
}

EnsState reflect(const EnsState& s) { return {reflect(s.a), reflect(s.w), reflect(s.u), s.epsilon, s.mu}; }

// Coarse coefficients placed on a finer grid of the same torus.
SpectralField refine(const SpectralField& f, const Grid& fine)
{
    const Grid& g = f.grid();
    SpectralField out(fine, f.components());
    int k[2];
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.wavenumbers(i, k);
        if (std::abs(k[0]) == g.n() / 2 || std::abs(k[1]) == g.n() / 2) continue;
        for (int c = 0; c < f.components(); ++c) out[c][fine.flat_index(k)] = f[c][i];
    }
    return out;
}

std::vector<RealArray> fd_gradient(const Grid& g, const RealArray& f)
{
    return {oracle::fd4(g, f, 0), oracle::fd4(g, f, 1)};
}

} // namespace

TEST_CASE("closure h")
{
    const Grid g(2, 64, kL);
    CHECK(closure_h(SpectralField::scalar(g)).max_abs() == 0.0);

    const SpectralField one = transform_forward(g, RealArray(g.size(), 1.0));
    const RealArray h1 = to_physical(closure_h(one));
    for (double v : h1) CHECK(v == doctest::Approx(-0.5).epsilon(1e-14));

    const RealArray a = oracle::sample(g, [](double x, double) { return 0.1 * std::sin(x); });
    const RealArray h = to_physical(closure_h(transform_forward(g, a)));
    RealArray ref(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) ref[i] = -a[i] / (1.0 + a[i]);
    CHECK(oracle::max_abs_diff(h, ref) < 1e-12);

    const RealArray deep = oracle::sample(g, [](double x, double) { return -0.6 * (1.0 + std::cos(x)) / 2.0; });
    CHECK_THROWS_AS(closure_h(transform_forward(g, deep)), DensityFloorError);
    CHECK_THROWS_AS(check_density_floor(RealArray{0.0, -0.51}), DensityFloorError);
    CHECK_NOTHROW(check_density_floor(RealArray{0.0, -0.5}));
}

TEST_CASE("right-hand sides vanish at equilibrium")
{
    const Grid g(2, 16, kL);
    const EnsState z = EnsState::zero(g, 0.1, 1.0);
    const EnsState r = rhs_ens(z);
    CHECK(r.a.max_abs() == 0.0);
    CHECK(r.w.max_abs() == 0.0);
    CHECK(r.u.max_abs() == 0.0);
    const KsnsState k = rhs_ksns(KsnsState::zero(g, 1.0));
    CHECK(k.a.max_abs() == 0.0);
    CHECK(k.u.max_abs() == 0.0);
}

TEST_CASE("linear E-NS action equals the B1 symbol on a gradient mode")
{
    const Grid g(2, 16, kL);
    const double eps = 0.1, amp = 1e-8;
    EnsState s = EnsState::zero(g, eps, 1.0);
    SpectralField phi = SpectralField::scalar(g);
    const int k[2] = {2, 1}, km[2] = {-2, -1};
    phi[0][g.flat_index(k)] = Complex(amp, 0.3 * amp);
    phi[0][g.flat_index(km)] = std::conj(phi[0][g.flat_index(k)]);
    s.w = gradient(phi);
    const EnsState r = rhs_ens(s);

    const std::size_t i = g.flat_index(k);
    const double xi = std::sqrt(g.frequency_norm_sq(i));
    const Complex wxi = (g.frequency(i, 0) * s.w[0][i] + g.frequency(i, 1) * s.w[1][i]) / xi;
    const Mat2 B = symbol_B1({xi, eps});
    auto [da, dw] = B.apply(0.0, wxi);
    CHECK(std::abs(r.a[0][i] + da) <= 1e-12 * std::abs(da));
    const Complex rxi = (g.frequency(i, 0) * r.w[0][i] + g.frequency(i, 1) * r.w[1][i]) / xi;
    CHECK(std::abs(rxi + dw) <= 1e-12 * std::abs(dw));
    CHECK(r.u.max_abs() <= 1e-12 * std::abs(wxi) / eps);
}

TEST_CASE("E-NS right-hand side matches a fourth-order finite-difference oracle")
{
    const Grid g(2, 32, kL);
    const Grid fine(2, 128, kL);
    const double eps = 0.2;
    const EnsState s = random_state(g, 100, eps, 0.05, 2.0);
    const EnsState r = rhs_ens(s);

    const RealArray a = to_physical(refine(s.a, fine));
    const auto w = transform_inverse(refine(s.w, fine));
    const auto u = transform_inverse(refine(s.u, fine));
    const auto ga = fd_gradient(fine, a);
    const auto gw0 = fd_gradient(fine, w[0]), gw1 = fd_gradient(fine, w[1]);
    const auto gu0 = fd_gradient(fine, u[0]), gu1 = fd_gradient(fine, u[1]);

    RealArray flux0(fine.size()), flux1(fine.size()), fa(fine.size());
    std::vector<RealArray> fw(2, RealArray(fine.size())), fu(2, RealArray(fine.size()));
    for (std::size_t i = 0; i < fine.size(); ++i) {
        flux0[i] = (1.0 + a[i]) * w[0][i];
        flux1[i] = (1.0 + a[i]) * w[1][i];
    }
    const RealArray d0 = oracle::fd4(fine, flux0, 0), d1 = oracle::fd4(fine, flux1, 1);
    for (std::size_t i = 0; i < fine.size(); ++i) {
        fa[i] = -(d0[i] + d1[i]) / eps;
        const double onehp = 1.0 / (1.0 + a[i]);
        for (int m = 0; m < 2; ++m) {
            const double adv_w = w[0][i] * (m == 0 ? gw0[0][i] : gw1[0][i]) + w[1][i] * (m == 0 ? gw0[1][i] : gw1[1][i]);
            fw[m][i] = -onehp * ga[m][i] / eps - (w[m][i] - eps * u[m][i]) / (eps * eps) - adv_w / eps;
            const double adv_u = u[0][i] * (m == 0 ? gu0[0][i] : gu1[0][i]) + u[1][i] * (m == 0 ? gu0[1][i] : gu1[1][i]);
            fu[m][i] = -adv_u + (1.0 + a[i]) * (w[m][i] - eps * u[m][i]) / eps;
        }
    }
    // Viscous term and projection are spectral in the oracle too.
    SpectralField fu_hat = transform_forward(fine, fu);
    fu_hat += laplacian(refine(s.u, fine));
    const auto fu_proj = transform_inverse(project_leray(fu_hat));

    const double tol = 2e-5;
    CHECK(oracle::max_abs_diff(to_physical(refine(r.a, fine)), fa) <= tol * max_abs(fa));
    const auto rw = transform_inverse(refine(r.w, fine));
    const auto ru = transform_inverse(refine(r.u, fine));
    for (int m = 0; m < 2; ++m) {
        CHECK(oracle::max_abs_diff(rw[m], fw[m]) <= tol * max_abs(fw[m]));
        CHECK(oracle::max_abs_diff(ru[m], fu_proj[m]) <= tol * max_abs(fu_proj[m]));
    }
}

TEST_CASE("KS-NS right-hand side")
{
    const Grid g(2, 32, kL);
    KsnsState s = random_limit(g, 7);
    s.u.set_zero();
    const KsnsState r = rhs_ksns(s);
    CHECK(max_abs_diff(r.a, laplacian(s.a)) <= 1e-15 * laplacian(s.a).max_abs());
    CHECK(r.u.max_abs() == 0.0);

    // a = 0: u_t = mu Lap u - P(u.grad u), checked against differences of the advection.
    const Grid fine(2, 128, kL);
    KsnsState v = random_limit(g, 8, 0.2, 2.0);
    v.a.set_zero();
    v.mu = 0.7;
    const KsnsState rv = rhs_ksns(v);
    const auto u = transform_inverse(refine(v.u, fine));
    const auto gu0 = fd_gradient(fine, u[0]), gu1 = fd_gradient(fine, u[1]);
    std::vector<RealArray> adv(2, RealArray(fine.size()));
    for (std::size_t i = 0; i < fine.size(); ++i) {
        adv[0][i] = -(u[0][i] * gu0[0][i] + u[1][i] * gu0[1][i]);
        adv[1][i] = -(u[0][i] * gu1[0][i] + u[1][i] * gu1[1][i]);
    }
    SpectralField ref = project_leray(transform_forward(fine, adv));
    ref.axpy(0.7, laplacian(refine(v.u, fine)));
    CHECK(max_abs_diff(refine(rv.u, fine), ref) <= 2e-5 * ref.max_abs());
    CHECK(divergence(rv.u).max_abs() <= 1e-12 * rv.u.max_abs());
}

TEST_CASE("mean conservation and Leray consistency of the right-hand sides")
{
    const Grid g(2, 32, kL);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        EnsState s = random_state(g, seed * 10, 0.1, 0.1);
        s.a[0][0] = 0.03;
        const EnsState r = rhs_ens(s);
        CHECK(std::abs(r.a[0][0]) <= 1e-14);
        CHECK(divergence(r.u).max_abs() <= 1e-10 * std::max(1.0, r.u.max_abs()));
        KsnsState k = random_limit(g, seed * 10 + 5, 0.1);
        k.a[0][0] = -0.02;
        const KsnsState rk = rhs_ksns(k);
        CHECK(std::abs(rk.a[0][0]) <= 1e-14);
        CHECK(divergence(rk.u).max_abs() <= 1e-10 * std::max(1.0, rk.u.max_abs()));
    }
}

TEST_CASE("frozen-u reduction")
{
    const Grid g(2, 32, kL);
    const EnsState s = random_state(g, 50, 0.1, 0.1);
    EnsOptions opt;
    opt.freeze_u = true;
    const EnsState full = rhs_ens(s), frozen = rhs_ens(s, opt);
    CHECK(frozen.u.max_abs() == 0.0);
    CHECK(max_abs_diff(frozen.a, full.a) == 0.0);
    CHECK(max_abs_diff(frozen.w, full.w) == 0.0);
}

TEST_CASE("linear and nonlinear parts sum to the full right-hand side")
{
    const Grid g(2, 32, kL);
    const EnsState s = random_state(g, 60, 0.1, 0.1);
    const EnsState f = rhs_ens(s), l = rhs_ens_linear(s), n = rhs_ens_nonlinear(s);
    CHECK(max_abs_diff(l.a + n.a, f.a) <= 1e-12 * f.a.max_abs());
    CHECK(max_abs_diff(l.w + n.w, f.w) <= 1e-12 * f.w.max_abs());
    CHECK(max_abs_diff(l.u + n.u, f.u) <= 1e-12 * f.u.max_abs());
    EnsOptions lin;
    lin.disable_nonlinear = true;
    const EnsState d = rhs_ens(s, lin);
    CHECK(max_abs_diff(d.w, l.w) == 0.0);

    const KsnsState k = random_limit(g, 61, 0.1);
    const KsnsState kf = rhs_ksns(k), kl = rhs_ksns_linear(k), kn = rhs_ksns_nonlinear(k);
    CHECK(max_abs_diff(kl.a + kn.a, kf.a) <= 1e-12 * kf.a.max_abs());
    CHECK(max_abs_diff(kl.u + kn.u, kf.u) <= 1e-12 * kf.u.max_abs());
}

TEST_CASE("reflection symmetry commutes with both right-hand sides")
{
    const Grid g(2, 32, kL);
    const EnsState s = random_state(g, 70, 0.1, 0.1);
    const EnsState a = rhs_ens(reflect(s)), b = reflect(rhs_ens(s));
    CHECK(max_abs_diff(a.a, b.a) <= 1e-10 * b.a.max_abs());
    CHECK(max_abs_diff(a.w, b.w) <= 1e-10 * b.w.max_abs());
    CHECK(max_abs_diff(a.u, b.u) <= 1e-10 * b.u.max_abs());
    const KsnsState k = random_limit(g, 71, 0.1);
    const KsnsState rk = rhs_ksns({reflect(k.a), reflect(k.u), k.mu});
    const KsnsState kr = rhs_ksns(k);
    CHECK(max_abs_diff(rk.a, reflect(kr.a)) <= 1e-10 * kr.a.max_abs());
    CHECK(max_abs_diff(rk.u, reflect(kr.u)) <= 1e-10 * kr.u.max_abs());
}

TEST_CASE("damped modes")
{
    const Grid g(2, 64, kL);
    const double eps = 0.1;
    EnsState s = random_state(g, 80, eps, 0.05);

    EnsState z = s;
    z.a.set_zero();
    z.w.set_zero();
    auto [Z0, R0] = damped_modes(z);
    CHECK(Z0.max_abs() == 0.0);
    CHECK(max_abs_diff(R0, -eps * z.u) <= 1e-17);

    EnsState p = z;
    p.w = eps * p.u;
    auto [Zp, Rp] = damped_modes(p);
    CHECK(Zp.max_abs() <= 1e-17);
    CHECK(Rp.max_abs() <= 1e-17);

    auto [Z, R] = damped_modes(s);
    SpectralField rebuilt = Z + R;
    rebuilt.axpy(eps, s.u);
    SpectralField ga = gradient(s.a);
    ga += multiply(closure_h(s.a), gradient(s.a));
    rebuilt.axpy(-eps, ga);
    CHECK(max_abs_diff(rebuilt, s.w) <= 1e-10 * s.w.max_abs());
}

TEST_CASE("the two expressions for Y agree")
{
    const Grid g(2, 64, kL);
    const EnsState zero = EnsState::zero(g, 0.1, 1.0);
    CHECK(source_Y(zero).max_abs() == 0.0);
    CHECK(source_Y_direct(zero).max_abs() == 0.0);

    EnsState p = zero;
    p.u = project_leray(oracle::random_field(g, 2, 3, 0.05));
    p.w = 0.1 * p.u;
    CHECK(source_Y(p).max_abs() <= 1e-17);
    CHECK(source_Y_direct(p).max_abs() <= 1e-16);

    for (std::uint64_t seed = 90; seed < 95; ++seed) {
        const EnsState s = random_state(g, seed, 0.1, 0.05);
        const SpectralField y1 = source_Y(s), y2 = source_Y_direct(s);
        CHECK(max_abs_diff(y1, y2) <= 1e-9 * y2.max_abs());
        const SpectralField u1 = rhs_ens(s).u, u2 = rhs_ens_u_damped_form(s);
        CHECK(max_abs_diff(u1, u2) <= 1e-9 * u1.max_abs());
    }
}

TEST_CASE("error-system identity for the density difference")
{
    const Grid g(2, 64, kL);
    const EnsState s = random_state(g, 110, 0.1, 0.05);
    const KsnsState k = random_limit(g, 120, 0.05);
    const SpectralField lhs = rhs_ens(s).a - rhs_ksns(k).a;
    const SpectralField da = s.a - k.a;
    SpectralField rhs = laplacian(da);
    rhs -= advect(s.u, da);
    rhs -= advect(s.u - k.u, k.a);
    rhs.axpy(1.0 / s.epsilon, source_Y(s));
    CHECK(max_abs_diff(lhs, rhs) <= 1e-9 * lhs.max_abs());
}

TEST_CASE("Darcy velocity")
{
    const Grid g(2, 64, kL);
    KsnsState k = KsnsState::zero(g, 1.0);
    CHECK(darcy_velocity(k).max_abs() == 0.0);

    k.u = project_leray(oracle::random_field(g, 2, 4, 0.3));
    CHECK(max_abs_diff(darcy_velocity(k), k.u) <= 1e-15);

    k.u.set_zero();
    const RealArray a = oracle::sample(g, [](double x, double) { return 0.1 * std::sin(x); });
    k.a = transform_forward(g, a);
    const auto W = transform_inverse(darcy_velocity(k));
    const RealArray ref = oracle::sample(g, [](double x, double) { return -0.1 * std::cos(x) / (1.0 + 0.1 * std::sin(x)); });
    CHECK(oracle::max_abs_diff(W[0], ref) <= 1e-12);
    CHECK(max_abs(W[1]) <= 1e-14);
}

TEST_CASE("diagnostics")
{
    const Grid g(2, 32, kL);
    const ThresholdConfig th{0.1, 2};
    const DyadicDecomposition lp(g);

    SUBCASE("equilibrium series")
    {
        DiagnosticsAccumulator acc(g, th);
        for (double t : {0.0, 0.5, 1.0}) {
            const DiagnosticsSample d = acc.push(t, EnsState::zero(g, 0.1, 1.0), KsnsState::zero(g, 1.0));
            CHECK(d.E_eps == 0.0);
            CHECK(d.D_eps == 0.0);
            CHECK(d.error_sup == 0.0);
            CHECK(d.darcy_integral == 0.0);
            CHECK(d.Y_norm == 0.0);
        }
        CHECK_THROWS_AS(acc.push(1.0, EnsState::zero(g, 0.1, 1.0), KsnsState::zero(g, 1.0)), ConfigError);
    }

    SUBCASE("prepared data leaves only the w terms of the initial error")
    {
        const KsnsState k = random_limit(g, 130, 0.05);
        const EnsState e = prepared(k, 0.1);
        const int J = th.J();
        const BlockNorms pw = lp.block_norms(project_leray(e.w)), w = lp.block_norms(e.w), a = lp.block_norms(e.a);
        const double ref = besov_from_blocks(pw, {0.0, SumExponent::One, Band::Low}, J) +
                           besov_from_blocks(w, {1.0, SumExponent::One, Band::Low}, J) +
                           0.1 * (besov_from_blocks(a, {2.0, SumExponent::One, Band::High}, J) +
                                  besov_from_blocks(w, {2.0, SumExponent::One, Band::High}, J));
        CHECK(initial_error_energy(lp, e, k, th) == doctest::Approx(ref).epsilon(1e-14));
    }

    SUBCASE("single snapshot reports instantaneous values")
    {
        const EnsState e = random_state(g, 140, 0.1, 0.05);
        const KsnsState k = random_limit(g, 150, 0.05);
        const std::vector<double> t{0.0};
        const auto d = diagnostics(t, std::span<const EnsState>(&e, 1), std::span<const KsnsState>(&k, 1), th);
        REQUIRE(d.size() == 1);
        CHECK(d[0].error_sup == d[0].error_norm);
        CHECK(d[0].Z_integral == 0.0);
        CHECK(d[0].error_norm == doctest::Approx(lp.besov_norm(e.a - k.a, {0.0}) + lp.besov_norm(e.u - k.u, {0.0})));
        CHECK(d[0].darcy_residual_norm > 0.0);
        for (double v : {d[0].E_eps, d[0].D_eps, d[0].Z_norm, d[0].R_norm, d[0].Y_norm, d[0].D_eps_increment})
            CHECK(v >= 0.0);
    }
}
