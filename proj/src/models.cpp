#include "relaxflow/models.hpp"

#include "relaxflow/errors.hpp"
#include "relaxflow/spectral_ops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace relaxflow {

namespace {

const Complex kI(0.0, 1.0);

RealArray physical(const Grid& g, const ComplexArray& c)
{
    ComplexArray z(g.size());
    g.plans().backward(c.data(), z.data());
    RealArray out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i].real();
    return out;
}

RealArray physical_derivative(const Grid& g, const ComplexArray& c, int m)
{
    ComplexArray d(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) d[i] = kI * g.derivative_frequency(i, m) * c[i];
    return physical(g, d);
}

ComplexArray spectral_dealiased(const Grid& g, const RealArray& v)
{
    ComplexArray buf(v.begin(), v.end());
    g.plans().forward(buf.data(), buf.data());
    const double inv_n = 1.0 / static_cast<double>(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) buf[i] = g.dealiased_keep(i) ? buf[i] * inv_n : Complex(0.0);
    return buf;
}

SpectralField scalar_from(const Grid& g, const RealArray& v)
{
    SpectralField f(g, 1);
    f[0] = spectral_dealiased(g, v);
    return f;
}

SpectralField vector_from(const Grid& g, const std::vector<RealArray>& v)
{
    SpectralField f(g, g.dim());
    for (int m = 0; m < g.dim(); ++m) f[m] = spectral_dealiased(g, v[static_cast<std::size_t>(m)]);
    return f;
}

std::vector<RealArray> physical_vector(const SpectralField& v)
{
    std::vector<RealArray> out;
    for (int m = 0; m < v.components(); ++m) out.push_back(physical(v.grid(), v[m]));
    return out;
}

// (v . grad) f_c for every component c of f, pointwise.
std::vector<RealArray> advection_physical(const std::vector<RealArray>& v, const SpectralField& f)
{
    const Grid& g = f.grid();
    std::vector<RealArray> out(static_cast<std::size_t>(f.components()), RealArray(g.size(), 0.0));
    for (int c = 0; c < f.components(); ++c) {
        for (int m = 0; m < g.dim(); ++m) {
            const RealArray d = physical_derivative(g, f[c], m);
            const RealArray& vm = v[static_cast<std::size_t>(m)];
            auto& o = out[static_cast<std::size_t>(c)];
            for (std::size_t i = 0; i < g.size(); ++i) o[i] += vm[i] * d[i];
        }
    }
    return out;
}

void require_state_shapes(const SpectralField& a, const SpectralField& v)
{
    if (!a.is_scalar() || !v.is_vector() || a.grid() != v.grid())
        throw ConfigError("state fields must be a scalar and vectors on one grid");
}

void require_epsilon(double eps)
{
    if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("epsilon must lie in (0, 1]");
}

} // namespace

EnsState EnsState::zero(const Grid& grid, double epsilon, double mu)
{
    return EnsState{SpectralField::scalar(grid), SpectralField::vector(grid), SpectralField::vector(grid),
                    epsilon, mu};
}

KsnsState KsnsState::zero(const Grid& grid, double mu)
{
    return KsnsState{SpectralField::scalar(grid), SpectralField::vector(grid), mu};
}

void check_density_floor(const RealArray& a_phys)
{
    const double lo = *std::min_element(a_phys.begin(), a_phys.end());
    if (1.0 + lo < 0.5) {
        std::ostringstream msg;
        msg << "density floor violated: min(1 + a) = " << 1.0 + lo << " < 1/2";
        throw DensityFloorError(msg.str());
    }
}

SpectralField closure_h(const SpectralField& a)
{
    if (!a.is_scalar()) throw ConfigError("closure_h expects a scalar field");
    const Grid& g = a.grid();
    RealArray p = physical(g, a[0]);
    check_density_floor(p);
    for (auto& v : p) v = -v / (1.0 + v);
    return scalar_from(g, p);
}

SpectralField advect(const SpectralField& v, const SpectralField& f)
{
    if (!v.is_vector() || v.grid() != f.grid()) throw ConfigError("advect expects a vector velocity");
    const Grid& g = f.grid();
    const auto out = advection_physical(physical_vector(v), f);
    return f.is_scalar() ? scalar_from(g, out[0]) : vector_from(g, out);
}

SpectralField multiply(const SpectralField& scalar, const SpectralField& f)
{
    if (!scalar.is_scalar() || scalar.grid() != f.grid()) throw ConfigError("multiply expects a scalar factor");
    const Grid& g = f.grid();
    const RealArray s = physical(g, scalar[0]);
    std::vector<RealArray> out = physical_vector(f);
    for (auto& comp : out)
        for (std::size_t i = 0; i < g.size(); ++i) comp[i] *= s[i];
    return f.is_scalar() ? scalar_from(g, out[0]) : vector_from(g, out);
}

// ============================================================================
// E-NS right-hand side
// ============================================================================

EnsState rhs_ens_linear(const EnsState& s, const EnsOptions& opt)
{
    require_state_shapes(s.a, s.w);
    require_epsilon(s.epsilon);
    const double e = s.epsilon;
    EnsState out = s;
    out.a = divergence(s.w);
    out.a *= -1.0 / e;

    SpectralField rel = s.w;
    rel.axpy(-e, s.u);
    out.w = gradient(s.a);
    out.w *= -1.0 / e;
    out.w.axpy(-1.0 / (e * e), rel);

    if (opt.freeze_u) {
        out.u.set_zero();
    } else {
        out.u = laplacian(s.u);
        out.u *= s.mu;
        out.u.axpy(1.0 / e, rel);
        out.u = project_leray(out.u);
    }
    return out;
}

EnsState rhs_ens_nonlinear(const EnsState& s, const EnsOptions& opt)
{
    require_state_shapes(s.a, s.w);
    require_epsilon(s.epsilon);
    const Grid& g = s.grid();
    const double e = s.epsilon;
    EnsState out = EnsState::zero(g, e, s.mu);
    if (opt.disable_nonlinear) return out;

    const RealArray a = physical(g, s.a[0]);
    check_density_floor(a);
    const auto w = physical_vector(s.w);
    const auto u = physical_vector(s.u);
    const std::size_t n = g.size();
    const int d = g.dim();

    // a: -div(a w)/eps
    std::vector<RealArray> aw(static_cast<std::size_t>(d), RealArray(n));
    for (int m = 0; m < d; ++m)
        for (std::size_t i = 0; i < n; ++i) aw[m][i] = a[i] * w[m][i];
    out.a = divergence(vector_from(g, aw));
    out.a *= -1.0 / e;

    // w: -(h grad a + w.grad w)/eps
    std::vector<RealArray> nw = advection_physical(w, s.w);
    for (int m = 0; m < d; ++m) {
        const RealArray da = physical_derivative(g, s.a[0], m);
        for (std::size_t i = 0; i < n; ++i) nw[m][i] = -(nw[m][i] - a[i] / (1.0 + a[i]) * da[i]) / e;
    }
    out.w = vector_from(g, nw);

    // u: P[-u.grad u + a (w - eps u)/eps]
    if (!opt.freeze_u) {
        std::vector<RealArray> nu = advection_physical(u, s.u);
        for (int m = 0; m < d; ++m)
            for (std::size_t i = 0; i < n; ++i) nu[m][i] = -nu[m][i] + a[i] * (w[m][i] / e - u[m][i]);
        out.u = project_leray(vector_from(g, nu));
    }
    return out;
}

EnsState rhs_ens(const EnsState& s, const EnsOptions& opt)
{
    EnsState lin = rhs_ens_linear(s, opt);
    const EnsState nl = rhs_ens_nonlinear(s, opt);
    lin.a += nl.a;
    lin.w += nl.w;
    lin.u += nl.u;
    return lin;
}

SpectralField rhs_ens_u_damped_form(const EnsState& s)
{
    auto [Z, R] = damped_modes(s);
    SpectralField zr = Z + R;
    SpectralField out = laplacian(s.u);
    out *= s.mu;
    out -= project_leray(advect(s.u, s.u));
    out.axpy(1.0 / s.epsilon, project_leray(multiply(s.a, zr)));
    out.axpy(1.0 / s.epsilon, R);
    return out;
}

// ============================================================================
// KS-NS right-hand side
// ============================================================================

KsnsState rhs_ksns_linear(const KsnsState& s)
{
    require_state_shapes(s.a, s.u);
    KsnsState out = s;
    out.a = laplacian(s.a);
    out.u = laplacian(s.u);
    out.u *= s.mu;
    return out;
}

KsnsState rhs_ksns_nonlinear(const KsnsState& s)
{
    require_state_shapes(s.a, s.u);
    const Grid& g = s.grid();
    const RealArray a = physical(g, s.a[0]);
    const auto u = physical_vector(s.u);
    std::vector<RealArray> au(static_cast<std::size_t>(g.dim()), RealArray(g.size()));
    for (int m = 0; m < g.dim(); ++m)
        for (std::size_t i = 0; i < g.size(); ++i) au[m][i] = a[i] * u[m][i];
    KsnsState out = s;
    out.a = divergence(vector_from(g, au));
    out.a *= -1.0;
    std::vector<RealArray> nu = advection_physical(u, s.u);
    for (auto& c : nu)
        for (auto& v : c) v = -v;
    out.u = project_leray(vector_from(g, nu));
    return out;
}

KsnsState rhs_ksns(const KsnsState& s)
{
    KsnsState lin = rhs_ksns_linear(s);
    const KsnsState nl = rhs_ksns_nonlinear(s);
    lin.a += nl.a;
    lin.u += nl.u;
    return lin;
}

// ============================================================================
// Damped modes, source, Darcy velocity
// ============================================================================

std::pair<SpectralField, SpectralField> damped_modes(const EnsState& s)
{
    require_state_shapes(s.a, s.w);
    const Grid& g = s.grid();
    const RealArray a = physical(g, s.a[0]);
    check_density_floor(a);
    std::vector<RealArray> ga(static_cast<std::size_t>(g.dim()));
    for (int m = 0; m < g.dim(); ++m) {
        ga[m] = physical_derivative(g, s.a[0], m);
        for (std::size_t i = 0; i < g.size(); ++i) ga[m][i] *= s.epsilon / (1.0 + a[i]);
    }
    SpectralField Z = project_compressible(s.w);
    Z += vector_from(g, ga);
    SpectralField R = project_leray(s.w);
    R.axpy(-s.epsilon, s.u);
    return {std::move(Z), std::move(R)};
}

SpectralField source_Y(const EnsState& s)
{
    auto [Z, R] = damped_modes(s);
    SpectralField zr = Z + R;
    SpectralField flux = multiply(s.a, zr);
    flux += zr;
    SpectralField y = divergence(flux);
    y *= -1.0;
    return y;
}

SpectralField source_Y_direct(const EnsState& s)
{
    require_state_shapes(s.a, s.w);
    SpectralField y = advect(s.w, s.a);
    y *= -1.0;
    const SpectralField divw = divergence(s.w);
    y -= divw;
    y -= multiply(s.a, divw);
    y.axpy(-s.epsilon, laplacian(s.a));
    y.axpy(s.epsilon, advect(s.u, s.a));
    return y;
}

SpectralField darcy_velocity(const KsnsState& s)
{
    require_state_shapes(s.a, s.u);
    const Grid& g = s.grid();
    const RealArray a = physical(g, s.a[0]);
    check_density_floor(a);
    std::vector<RealArray> out = physical_vector(s.u);
    for (int m = 0; m < g.dim(); ++m) {
        const RealArray da = physical_derivative(g, s.a[0], m);
        for (std::size_t i = 0; i < g.size(); ++i) out[m][i] -= da[i] / (1.0 + a[i]);
    }
    return vector_from(g, out);
}

// ============================================================================
// Functionals
// ============================================================================

namespace {

constexpr BesovSpec all(double s) { return {s, SumExponent::One, Band::All}; }
constexpr BesovSpec low(double s) { return {s, SumExponent::One, Band::Low}; }
constexpr BesovSpec high(double s) { return {s, SumExponent::One, Band::High}; }

// Regularity indices d/2 - 1 + k.
double idx(const Grid& g, int k) { return 0.5 * g.dim() - 1.0 + k; }

} // namespace

double initial_energy(const DyadicDecomposition& lp, const KsnsState& limit0)
{
    const Grid& g = lp.grid();
    const BlockNorms a = lp.block_norms(limit0.a);
    const BlockNorms u = lp.block_norms(limit0.u);
    return besov_from_blocks(a, all(idx(g, 0))) + besov_from_blocks(a, all(idx(g, 1))) +
           besov_from_blocks(u, all(idx(g, 0)));
}

double initial_error_energy(const DyadicDecomposition& lp, const EnsState& ens0, const KsnsState& limit0,
                            const ThresholdConfig& threshold)
{
    const Grid& g = lp.grid();
    const int J = threshold.J();
    lp.check_threshold(J);
    const double e = ens0.epsilon;
    const BlockNorms da = lp.block_norms(ens0.a - limit0.a);
    const BlockNorms du = lp.block_norms(ens0.u - limit0.u);
    const BlockNorms pw = lp.block_norms(project_leray(ens0.w));
    const BlockNorms w = lp.block_norms(ens0.w);
    const BlockNorms a = lp.block_norms(ens0.a);
    return besov_from_blocks(da, low(idx(g, 0)), J) / e + besov_from_blocks(du, all(idx(g, 0))) / e +
           besov_from_blocks(pw, low(idx(g, 0)), J) + besov_from_blocks(w, low(idx(g, 1)), J) +
           e * (besov_from_blocks(a, high(idx(g, 2)), J) + besov_from_blocks(w, high(idx(g, 2)), J));
}

DiagnosticsAccumulator::DiagnosticsAccumulator(const Grid& grid, ThresholdConfig threshold)
    : lp_(grid), threshold_(threshold)
{
    lp_.check_threshold(threshold_.J());
}

DiagnosticsSample DiagnosticsAccumulator::push(double t, const EnsState& ens, const KsnsState& ksns)
{
    if (!samples_.empty() && !(t > samples_.back().time))
        throw ConfigError("diagnostic samples must advance in time");
    const Grid& g = lp_.grid();
    const int J = threshold_.J();
    const double e = ens.epsilon;
    const double s0 = idx(g, 0), s1 = idx(g, 1), s2 = idx(g, 2), s3 = idx(g, 3);

    const BlockNorms a = lp_.block_norms(ens.a);
    const BlockNorms u = lp_.block_norms(ens.u);
    const BlockNorms w = lp_.block_norms(ens.w);
    const BlockNorms pw = lp_.block_norms(project_leray(ens.w));
    auto [Zf, Rf] = damped_modes(ens);
    const BlockNorms Z = lp_.block_norms(Zf);
    const BlockNorms R = lp_.block_norms(Rf);
    const BlockNorms da = lp_.block_norms(ens.a - ksns.a);
    const BlockNorms du = lp_.block_norms(ens.u - ksns.u);

    const double e_terms[5] = {
        besov_from_blocks(a, all(s0)) + besov_from_blocks(a, all(s1)),
        besov_from_blocks(u, all(s0)),
        besov_from_blocks(pw, low(s0), J),
        besov_from_blocks(w, low(s1), J),
        e * besov_from_blocks(w, high(s2), J),
    };

    DiagnosticsSample out;
    out.time = t;
    for (int i = 0; i < 5; ++i) {
        E_sup_[i] = std::max(E_sup_[i], e_terms[i]);
        out.E_eps += E_sup_[i];
    }

    Integrands cur;
    out.Z_norm = besov_from_blocks(Z, all(s1));
    out.R_norm = besov_from_blocks(R, all(s0)) + besov_from_blocks(R, all(s1));
    cur.Z = out.Z_norm;
    cur.R = out.R_norm;
    cur.w_sq = std::pow(besov_from_blocks(w, all(s1)), 2);
    cur.D = besov_from_blocks(a, all(s2)) + besov_from_blocks(a, low(s3), J) + besov_from_blocks(u, all(s2)) +
            besov_from_blocks(w, all(s2)) / e + (cur.Z + cur.R) / (e * e);

    SpectralField residual = ens.w;
    residual *= 1.0 / e;
    residual -= darcy_velocity(ksns);
    out.darcy_residual_norm = lp_.sum_space_norm(residual, s1, s2);
    cur.darcy = out.darcy_residual_norm;

    out.error_norm = besov_from_blocks(da, all(s0)) + besov_from_blocks(du, all(s0));
    cur.err_diss = besov_from_blocks(da, all(s2)) + besov_from_blocks(du, all(s2));
    out.Y_norm = besov_from_blocks(lp_.block_norms(source_Y(ens)), all(s0));
    const EnsState re = rhs_ens(ens);
    const KsnsState rk = rhs_ksns(ksns);
    cur.dt_err = besov_from_blocks(lp_.block_norms(re.a - rk.a), all(s0)) +
                 besov_from_blocks(lp_.block_norms(re.u - rk.u), all(s2));
    out.D_eps_increment = cur.D;

    if (samples_.empty()) {
        out.error_sup = out.error_norm;
    } else {
        const DiagnosticsSample& p = samples_.back();
        const double h = 0.5 * (t - p.time);
        out.error_sup = std::max(p.error_sup, out.error_norm);
        out.Z_integral = p.Z_integral + h * (prev_.Z + cur.Z);
        out.R_integral = p.R_integral + h * (prev_.R + cur.R);
        out.darcy_integral = p.darcy_integral + h * (prev_.darcy + cur.darcy);
        out.error_dissipation = p.error_dissipation + h * (prev_.err_diss + cur.err_diss);
        out.dt_error_integral = p.dt_error_integral + h * (prev_.dt_err + cur.dt_err);
        w_sq_integral_ += h * (prev_.w_sq + cur.w_sq);
        D_other_integral_ += h * (prev_.D + cur.D);
    }
    out.D_eps = D_other_integral_ + std::sqrt(w_sq_integral_) / e;
    prev_ = cur;
    samples_.push_back(out);
    return out;
}

std::vector<DiagnosticsSample> diagnostics(std::span<const double> times, std::span<const EnsState> ens,
                                           std::span<const KsnsState> ksns, const ThresholdConfig& threshold)
{
    if (times.size() != ens.size() || times.size() != ksns.size())
        throw ConfigError("diagnostics needs matching series lengths");
    if (times.empty()) return {};
    DiagnosticsAccumulator acc(ens.front().grid(), threshold);
    for (std::size_t i = 0; i < times.size(); ++i) acc.push(times[i], ens[i], ksns[i]);
    return acc.samples();
}

} // namespace relaxflow
