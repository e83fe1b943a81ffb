#include "relaxflow/selftest.hpp"

#include "relaxflow/initial_data.hpp"
#include "relaxflow/linear_spectrum.hpp"
#include "relaxflow/littlewood_paley.hpp"
#include "relaxflow/models.hpp"
#include "relaxflow/ode.hpp"
#include "relaxflow/spectral_ops.hpp"
#include "relaxflow/time_integrator.hpp"

#include <cmath>
#include <random>

namespace relaxflow {

namespace {

CheckResult at_most(std::string name, double value, double tol)
{
    return {std::move(name), std::isfinite(value) && value <= tol, value, tol};
}

double relative(double diff, double scale)
{
    return diff / std::max(scale, 1e-300);
}

SpectralField random_field(const Grid& g, int comps, std::mt19937_64& rng, double peak)
{
    SpectralField f = random_band_limited(g, comps, {-1.0, 3.0}, rng);
    double m = 0.0;
    for (const auto& c : transform_inverse(f)) m = std::max(m, max_abs(c));
    if (m > 0.0) f *= peak / m;
    return f;
}

EnsState random_ens(const Grid& g, std::mt19937_64& rng, double eps, double peak)
{
    EnsState s = EnsState::zero(g, eps, 1.0);
    s.a = random_field(g, 1, rng, peak);
    s.w = random_field(g, g.dim(), rng, peak);
    s.u = project_leray(random_field(g, g.dim(), rng, peak));
    return s;
}

// Root lambda1 of l^2 + l/eps^2 + xi^2/eps^2 = 0, optionally with the wrong discriminant sign.
Complex lambda1_of(const SymbolPoint& p, bool perturb)
{
    if (!perturb) return eigenvalues(p).lambda1;
    const double b = 1.0 / (p.epsilon * p.epsilon);
    const double c = p.xi_norm * p.xi_norm * b;
    return 0.5 * (-b + std::sqrt(Complex(b * b + 4.0 * c)));
}

double char_poly_residual(const SelftestFixtures& fx, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
        SymbolPoint p;
        p.epsilon = std::pow(10.0, -2.0 + 2.0 * U(rng));
        p.xi_norm = std::pow(10.0, -3.0 + 6.0 * U(rng));
        const SymbolEigenSet s = eigenvalues(p);
        for (Complex l : {lambda1_of(p, fx.perturb_branch), s.lambda2})
            worst = std::max(worst, char_poly_residual(p, Block::B1, l));
        for (Complex l : {s.lambda3, s.lambda4}) worst = std::max(worst, char_poly_residual(p, Block::B2, l));
    }
    return worst;
}

double propagator_vs_ode()
{
    double worst = 0.0;
    const SymbolPoint pts[] = {{0.3, 0.2, 1.0, 2}, {2.5, 0.2, 1.0, 2}, {10.0, 0.05, 0.5, 2}, {1.0 / 0.4, 0.2, 2.0, 2}};
    for (const SymbolPoint& p : pts) {
        for (int which = 0; which < 2; ++which) {
            const Mat2 B = which == 0 ? symbol_B1(p) : symbol_B2(p);
            const double t = 0.5 * p.epsilon * p.epsilon;
            const Mat2 E = which == 0 ? propagator_B1(p, t) : propagator_B2(p, t);
            for (int col = 0; col < 2; ++col) {
                ComplexArray y{col == 0 ? 1.0 : 0.0, col == 1 ? 1.0 : 0.0};
                y = dopri5(
                    [&](double, const ComplexArray& v, ComplexArray& dv) {
                        auto [d0, d1] = B.apply(v[0], v[1]);
                        dv = {-d0, -d1};
                    },
                    y, 0.0, t);
                worst = std::max({worst, std::abs(y[0] - E(0, col)), std::abs(y[1] - E(1, col))});
            }
        }
    }
    return worst;
}

} // namespace

std::vector<CheckResult> run_invariant_checks(const SelftestFixtures& fx, unsigned long long seed)
{
    std::mt19937_64 rng(seed);
    std::vector<CheckResult> out;
    const Grid g(2, 32, 2.0 * M_PI);

    {
        const SpectralField v = random_field(g, 2, rng, 1.0);
        const SpectralField p = project_leray(v);
        const double scale = v.max_abs();
        out.push_back(at_most("leray_idempotent", relative(max_abs_diff(project_leray(p), p), scale), 1e-13));
        out.push_back(
            at_most("leray_complement", relative(max_abs_diff(p + project_compressible(v), v), scale), 1e-13));
        out.push_back(at_most("leray_divergence_free", relative(divergence(p).max_abs(), scale), 1e-12));
    }
    {
        const SpectralField f = random_field(g, 1, rng, 1.0);
        const RealArray x = to_physical(f);
        double s = 0.0;
        for (double v : x) s += v * v;
        const double phys = std::sqrt(s * g.volume() / static_cast<double>(g.size()));
        out.push_back(at_most("parseval", std::abs(phys - l2_norm(f)) / l2_norm(f), 1e-12));
        const SpectralField back = transform_forward(g, x);
        out.push_back(at_most("fft_round_trip", relative(max_abs_diff(back, f), f.max_abs()), 1e-13));
    }
    {
        const DyadicDecomposition lp =
            fx.corrupt_profile
                ? DyadicDecomposition(g, smooth_cutoff, [](double r) { return 1.1 * dyadic_bump(r); })
                : DyadicDecomposition(g);
        out.push_back(at_most("partition_of_unity", lp.partition_defect(), 1e-12));

        std::mt19937_64 r2(seed + 1);
        SpectralField f = random_band_limited(g, 1, {0.0, 14.0}, r2);
        double worst = 0.0;
        for (int j = lp.j_min(); j <= lp.j_max(); ++j) {
            const SpectralField b = lp.block(f, j);
            const double nb = l2_norm(b);
            if (nb == 0.0) continue;
            worst = std::max(worst, l2_norm(gradient(b)) / (std::ldexp(8.0 / 3.0, j) * nb));
        }
        out.push_back(at_most("bernstein_gradient", worst, 1.0 + 1e-12));
    }
    out.push_back(at_most("char_poly_residual", char_poly_residual(fx, rng), 1e-10));
    out.push_back(at_most("propagator_vs_ode", propagator_vs_ode(), 1e-8));
    {
        KsnsState s = KsnsState::zero(g, 1.0);
        const int k[2] = {2, 1};
        const int km[2] = {-2, -1};
        s.a[0][g.flat_index(k)] = 0.05;
        s.a[0][g.flat_index(km)] = 0.05;
        KsnsStepper st(g, 1.0);
        StepperConfig cfg;
        const double t = 0.3;
        for (int i = 0; i < 30; ++i) s = st.step(s, t / 30, cfg);
        const double exact = 0.05 * std::exp(-5.0 * t);
        out.push_back(at_most("heat_mode_decay", std::abs(s.a[0][g.flat_index(k)].real() - exact) / exact, 1e-12));
    }
    {
        // Nonpolynomial closures alias; the finer grid pushes that below the tolerance.
        const Grid fine(2, 64, 2.0 * M_PI);
        const EnsState s = random_ens(fine, rng, 0.1, 0.05);
        auto [Z, R] = damped_modes(s);
        SpectralField rebuilt = Z + R;
        rebuilt.axpy(s.epsilon, s.u);
        SpectralField ga = gradient(s.a);
        SpectralField corr = multiply(closure_h(s.a), ga);
        ga += corr;
        rebuilt.axpy(-s.epsilon, ga);
        out.push_back(at_most("damped_mode_reconstruction", relative(max_abs_diff(rebuilt, s.w), s.w.max_abs()), 1e-10));

        const SpectralField y1 = source_Y(s);
        const SpectralField y2 = source_Y_direct(s);
        out.push_back(at_most("source_Y_forms", relative(max_abs_diff(y1, y2), y2.max_abs()), 1e-10));

        const SpectralField u1 = rhs_ens(s).u;
        const SpectralField u2 = rhs_ens_u_damped_form(s);
        out.push_back(at_most("u_damped_form", relative(max_abs_diff(u1, u2), u1.max_abs()), 1e-10));
    }
    {
        EnsState s = random_ens(g, rng, 0.1, 0.1);
        const int zero[2] = {0, 0};
        s.a[0][g.flat_index(zero)] = 0.02;
        EnsStepper st(g, s.epsilon, s.mu);
        StepperConfig cfg;
        for (int i = 0; i < 10; ++i) s = st.step(s, 0.005, cfg);
        out.push_back(at_most("mean_density_conserved", std::abs(s.a[0][g.flat_index(zero)].real() - 0.02), 1e-14));
        out.push_back(at_most("u_divergence_free", relative(divergence(s.u).max_abs(), s.u.max_abs()), 1e-12));
    }
    return out;
}

std::vector<CheckResult> run_selftest_suite(unsigned long long seed)
{
    std::vector<CheckResult> out = run_invariant_checks({}, seed);
    auto detected = [&](const SelftestFixtures& fx, const std::string& check, const std::string& label) {
        for (const CheckResult& c : run_invariant_checks(fx, seed))
            if (c.name == check) {
                out.push_back({label, !c.passed, c.value, c.tolerance});
                return;
            }
    };
    detected({true, false}, "partition_of_unity", "negative_control_corrupt_profile");
    detected({false, true}, "char_poly_residual", "negative_control_perturbed_branch");
    return out;
}

} // namespace relaxflow
