#include "relaxflow/time_integrator.hpp"

#include "relaxflow/errors.hpp"
#include "relaxflow/spectral_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace relaxflow {

namespace {

constexpr std::size_t kCacheSize = 4;

// |k|^2 of every mode kept by the dealiasing rule, -1 otherwise.
std::vector<int> radial_keys(const Grid& g, int& max_key)
{
    std::vector<int> keys(g.size(), -1);
    max_key = 0;
    int k[3];
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g.dealiased_keep(i)) continue;
        g.wavenumbers(i, k);
        int k2 = 0;
        for (int m = 0; m < g.dim(); ++m) k2 += k[m] * k[m];
        keys[i] = k2;
        max_key = std::max(max_key, k2);
    }
    return keys;
}

std::array<Mat2, 5> exponential_weights(const Mat2& B, double h)
{
    const Mat2 Z = Complex(-h) * B;
    const Mat2 Zh = Complex(-0.5 * h) * B;
    const Mat2 p1 = phi_matrix(Z, 1);
    const Mat2 p2 = phi_matrix(Z, 2);
    return {phi_matrix(Zh, 0), Complex(0.5 * h) * phi_matrix(Zh, 1), phi_matrix(Z, 0),
            Complex(h) * (p1 + Complex(-2.0) * p2), Complex(2.0 * h) * p2};
}

void scalar_weights(double z_rate, double h, double* out)
{
    const Complex z(-h * z_rate), zh(-0.5 * h * z_rate);
    const double p1 = phi(1, z).real(), p2 = phi(2, z).real();
    out[0] = std::exp(zh.real());
    out[1] = 0.5 * h * phi(1, zh).real();
    out[2] = std::exp(z.real());
    out[3] = h * (p1 - 2.0 * p2);
    out[4] = 2.0 * h * p2;
}

template <class C, class Make>
const C& cached(std::deque<C>& cache, double h, Make make)
{
    for (const auto& c : cache)
        if (c.h == h) return c;
    cache.push_front(make());
    if (cache.size() > kCacheSize) cache.pop_back();
    return cache.front();
}

double max_abs_physical(const SpectralField& f)
{
    double m = 0.0;
    for (int c = 0; c < f.components(); ++c) m = std::max(m, max_abs(to_physical(f, c)));
    return m;
}

int halvings_needed(double h, double speed, const Grid& g, const StepperConfig& cfg)
{
    if (!(speed > 0.0)) return 0;
    const double limit = cfg.cfl_safety * g.spacing() / speed;
    int k = 0;
    while (std::ldexp(h, -k) > limit) {
        if (++k > cfg.max_halvings) {
            std::ostringstream msg;
            msg << "CFL limit " << limit << " not met after " << cfg.max_halvings << " halvings of dt = " << h;
            throw CflError(msg.str());
        }
    }
    return k;
}

} // namespace

// ============================================================================
// StepperConfig
// ============================================================================

void StepperConfig::validate() const
{
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be >= 0");
    if (!(output_stride > 0.0)) throw ConfigError("output_stride must be positive");
    if (!(cfl_safety > 0.0 && cfl_safety < 1.0)) throw ConfigError("cfl_safety must lie in (0, 1)");
    if (std::abs(dealias_fraction - 2.0 / 3.0) > 1e-12) throw ConfigError("dealias_fraction is fixed to 2/3");
    if (max_halvings < 0) throw ConfigError("max_halvings must be >= 0");
}

std::vector<double> StepperConfig::output_times() const
{
    validate();
    std::vector<double> t{0.0};
    const long n = static_cast<long>(std::floor(t_end * output_stride + 1e-9));
    for (long k = 1; k <= n; ++k) t.push_back(static_cast<double>(k) / output_stride);
    if (t_end > 0.0) t.push_back(t_end);
    for (double x : extra_output_times)
        if (x > 0.0 && x < t_end) t.push_back(x);
    std::sort(t.begin(), t.end());
    std::vector<double> out;
    for (double x : t)
        if (out.empty() || x - out.back() > 1e-12 * std::max(1.0, x)) out.push_back(x);
    if (t_end > 0.0) out.back() = t_end;
    return out;
}

std::vector<double> initial_layer_times(double epsilon, double lo, double hi, int count)
{
    if (!(lo > 0.0 && hi > lo) || count < 2) throw ConfigError("initial layer window must satisfy 0 < lo < hi");
    std::vector<double> t(static_cast<std::size_t>(count));
    const double e2 = epsilon * epsilon;
    for (int i = 0; i < count; ++i) t[i] = e2 * lo * std::pow(hi / lo, double(i) / (count - 1));
    return t;
}

// ============================================================================
// EnsStepper
// ============================================================================

EnsStepper::EnsStepper(const Grid& grid, double epsilon, double mu, EnsOptions options)
    : grid_(grid), epsilon_(epsilon), mu_(mu), opt_(options)
{
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must lie in (0, 1]");
    if (!(mu > 0.0)) throw ConfigError("mu must be positive");
    radial_key_ = radial_keys(grid, max_key_);
    if (opt_.limit_symbols) limit_ = std::make_unique<KsnsStepper>(grid, mu, opt_.disable_nonlinear);
}

EnsStepper::~EnsStepper() = default;
EnsStepper::EnsStepper(EnsStepper&&) noexcept = default;

const EnsStepper::Coefficients& EnsStepper::coefficients(double h)
{
    return cached(cache_, h, [&] {
        Coefficients c;
        c.h = h;
        c.b1.resize(static_cast<std::size_t>(max_key_ + 1));
        c.b2.resize(static_cast<std::size_t>(max_key_ + 1));
        std::vector<char> used(static_cast<std::size_t>(max_key_ + 1), 0);
        for (int k : radial_key_)
            if (k >= 0) used[static_cast<std::size_t>(k)] = 1;
        for (int k = 0; k <= max_key_; ++k) {
            if (!used[static_cast<std::size_t>(k)]) continue;
            const SymbolPoint p{grid_.base_frequency() * std::sqrt(double(k)), epsilon_, mu_, grid_.dim()};
            Mat2 b2 = symbol_B2(p);
            if (opt_.freeze_u) b2.m[2] = b2.m[3] = 0.0;
            c.b1[static_cast<std::size_t>(k)] = exponential_weights(symbol_B1(p), h);
            c.b2[static_cast<std::size_t>(k)] = exponential_weights(b2, h);
        }
        return c;
    });
}

EnsState EnsStepper::combine(const EnsState& U, const EnsState& N0, const EnsState* N1, const Coefficients& c,
                             bool second_stage) const
{
    const int d = grid_.dim();
    const std::size_t iu = second_stage ? 2 : 0, in0 = second_stage ? 3 : 1, in1 = 4;
    EnsState out = EnsState::zero(grid_, epsilon_, mu_);
    double xh[3];
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        const int key = radial_key_[i];
        if (key < 0) continue;
        const auto& m1 = c.b1[static_cast<std::size_t>(key)];
        const auto& m2 = c.b2[static_cast<std::size_t>(key)];

        // B2 on (w_perp_m, u_m); at key 0 the whole of w is "perpendicular".
        double norm = 0.0;
        for (int m = 0; m < d; ++m) {
            xh[m] = grid_.derivative_frequency(i, m);
            norm += xh[m] * xh[m];
        }
        norm = std::sqrt(norm);
        for (int m = 0; m < d; ++m) xh[m] = norm > 0.0 ? xh[m] / norm : 0.0;

        auto parallel = [&](const EnsState& s) {
            Complex p = 0.0;
            for (int m = 0; m < d; ++m) p += xh[m] * s.w[m][i];
            return p;
        };
        const Complex pu = parallel(U), p0 = parallel(N0), p1 = N1 ? parallel(*N1) : Complex(0.0);

        auto accumulate = [&](const Mat2& M, Complex x0, Complex x1, Complex& y0, Complex& y1) {
            const auto [r0, r1] = M.apply(x0, x1);
            y0 += r0;
            y1 += r1;
        };

        Complex a_out = 0.0, par_out = 0.0;
        accumulate(m1[iu], U.a[0][i], pu, a_out, par_out);
        accumulate(m1[in0], N0.a[0][i], p0, a_out, par_out);
        if (N1) accumulate(m1[in1], N1->a[0][i], p1, a_out, par_out);
        out.a[0][i] = a_out;

        for (int m = 0; m < d; ++m) {
            Complex w_out = 0.0, u_out = 0.0;
            accumulate(m2[iu], U.w[m][i] - xh[m] * pu, U.u[m][i], w_out, u_out);
            accumulate(m2[in0], N0.w[m][i] - xh[m] * p0, N0.u[m][i], w_out, u_out);
            if (N1) accumulate(m2[in1], N1->w[m][i] - xh[m] * p1, N1->u[m][i], w_out, u_out);
            out.w[m][i] = w_out + xh[m] * par_out;
            out.u[m][i] = u_out;
        }
    }
    return out;
}

void EnsStepper::restore(EnsState& s) const
{
    s.a.dealias();
    s.w.dealias();
    s.u.dealias();
    s.u = project_leray(s.u);
    s.a.symmetrize();
    s.w.symmetrize();
    s.u.symmetrize();
}

EnsState EnsStepper::limit_step(const EnsState& s, double h)
{
    KsnsState k{s.a, s.u, mu_};
    k = limit_->step_unchecked(k, h);
    SpectralField w(grid_, grid_.dim());
    if (opt_.disable_nonlinear) {
        w = k.u - gradient(k.a);
    } else {
        w = darcy_velocity(k);
    }
    w *= epsilon_;
    EnsState out{k.a, w, k.u, epsilon_, mu_};
    restore(out);
    return out;
}

EnsState EnsStepper::step_unchecked(const EnsState& s, double h)
{
    if (s.grid() != grid_ || s.epsilon != epsilon_ || s.mu != mu_)
        throw ConfigError("state does not match the stepper's grid or parameters");
    if (opt_.limit_symbols) return limit_step(s, h);
    const Coefficients& c = coefficients(h);
    const EnsState N0 = rhs_ens_nonlinear(s, opt_);
    const EnsState half = combine(s, N0, nullptr, c, false);
    const EnsState N1 = rhs_ens_nonlinear(half, opt_);
    EnsState out = combine(s, N0, &N1, c, true);
    if (opt_.freeze_u) out.u = s.u;
    restore(out);
    return out;
}

double EnsStepper::transport_speed(const EnsState& s) const
{
    return std::max(max_abs_physical(s.w) / epsilon_, max_abs_physical(s.u));
}

EnsState EnsStepper::step(const EnsState& s, double h, const StepperConfig& cfg)
{
    const int k = halvings_needed(h, transport_speed(s), grid_, cfg);
    halvings_ += k;
    const long n = 1L << k;
    const double sub = std::ldexp(h, -k);
    EnsState cur = s;
    for (long i = 0; i < n; ++i) {
        cur = step_unchecked(cur, sub);
        ++accepted_;
    }
    return cur;
}

// ============================================================================
// KsnsStepper
// ============================================================================

KsnsStepper::KsnsStepper(const Grid& grid, double mu, bool linear_only)
    : grid_(grid), mu_(mu), linear_only_(linear_only)
{
    if (!(mu > 0.0)) throw ConfigError("mu must be positive");
    radial_key_ = radial_keys(grid, max_key_);
}

const KsnsStepper::Coefficients& KsnsStepper::coefficients(double h)
{
    return cached(cache_, h, [&] {
        Coefficients c;
        c.h = h;
        c.c.resize(static_cast<std::size_t>(max_key_ + 1));
        const double k0 = grid_.base_frequency();
        for (int k = 0; k <= max_key_; ++k) {
            const double x2 = k0 * k0 * k;
            scalar_weights(x2, h, c.c[static_cast<std::size_t>(k)].data());
            scalar_weights(mu_ * x2, h, c.c[static_cast<std::size_t>(k)].data() + 5);
        }
        return c;
    });
}

KsnsState KsnsStepper::step_unchecked(const KsnsState& s, double h)
{
    if (s.grid() != grid_ || s.mu != mu_) throw ConfigError("state does not match the stepper's grid or viscosity");
    const Coefficients& c = coefficients(h);
    const int d = grid_.dim();
    auto nonlinear = [&](const KsnsState& x) {
        return linear_only_ ? KsnsState::zero(grid_, mu_) : rhs_ksns_nonlinear(x);
    };
    auto combine = [&](const KsnsState& U, const KsnsState& N0, const KsnsState* N1, bool second) {
        const std::size_t iu = second ? 2 : 0, in0 = second ? 3 : 1;
        KsnsState out = KsnsState::zero(grid_, mu_);
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            const int key = radial_key_[i];
            if (key < 0) continue;
            const double* w = c.c[static_cast<std::size_t>(key)].data();
            out.a[0][i] = w[iu] * U.a[0][i] + w[in0] * N0.a[0][i] + (N1 ? w[4] * N1->a[0][i] : 0.0);
            for (int m = 0; m < d; ++m)
                out.u[m][i] = w[5 + iu] * U.u[m][i] + w[5 + in0] * N0.u[m][i] + (N1 ? w[9] * N1->u[m][i] : 0.0);
        }
        return out;
    };
    const KsnsState N0 = nonlinear(s);
    const KsnsState half = combine(s, N0, nullptr, false);
    const KsnsState N1 = nonlinear(half);
    KsnsState out = combine(s, N0, &N1, true);
    out.u = project_leray(out.u);
    out.a.symmetrize();
    out.u.symmetrize();
    return out;
}

KsnsState KsnsStepper::step(const KsnsState& s, double h, const StepperConfig& cfg)
{
    const int k = halvings_needed(h, max_abs_physical(s.u), grid_, cfg);
    halvings_ += k;
    const long n = 1L << k;
    const double sub = std::ldexp(h, -k);
    KsnsState cur = s;
    for (long i = 0; i < n; ++i) {
        cur = step_unchecked(cur, sub);
        ++accepted_;
    }
    return cur;
}

// ============================================================================
// Drivers
// ============================================================================

namespace {

// Uniform substeps of size <= dt that land exactly on t1.
template <class Advance>
void advance_to(double t0, double t1, double dt, Advance advance)
{
    const long n = std::max(1L, static_cast<long>(std::ceil((t1 - t0) / dt - 1e-9)));
    const double h = (t1 - t0) / static_cast<double>(n);
    for (long i = 0; i < n; ++i) advance(h);
}

} // namespace

Trajectory<EnsState> integrate(const EnsState& initial, const StepperConfig& cfg, const EnsOptions& opt,
                               const EnsHook& hook, bool store_states)
{
    const auto times = cfg.output_times();
    Trajectory<EnsState> tr;
    EnsStepper stepper(initial.grid(), initial.epsilon, initial.mu, opt);
    EnsState cur = initial;
    auto emit = [&](double t) {
        tr.times.push_back(t);
        if (store_states) tr.states.push_back(cur);
        if (hook) hook(t, cur);
    };
    try {
        emit(0.0);
        for (std::size_t k = 1; k < times.size(); ++k) {
            advance_to(times[k - 1], times[k], cfg.dt, [&](double h) { cur = stepper.step(cur, h, cfg); });
            emit(times[k]);
        }
    } catch (const NumericalError& e) {
        tr.failed = true;
        tr.failure = e.what();
    }
    tr.accepted_steps = stepper.accepted_steps();
    tr.halvings = stepper.halvings();
    return tr;
}

Trajectory<KsnsState> integrate(const KsnsState& initial, const StepperConfig& cfg, const KsnsHook& hook,
                                bool store_states)
{
    const auto times = cfg.output_times();
    Trajectory<KsnsState> tr;
    KsnsStepper stepper(initial.grid(), initial.mu);
    KsnsState cur = initial;
    auto emit = [&](double t) {
        tr.times.push_back(t);
        if (store_states) tr.states.push_back(cur);
        if (hook) hook(t, cur);
    };
    try {
        emit(0.0);
        for (std::size_t k = 1; k < times.size(); ++k) {
            advance_to(times[k - 1], times[k], cfg.dt, [&](double h) { cur = stepper.step(cur, h, cfg); });
            emit(times[k]);
        }
    } catch (const NumericalError& e) {
        tr.failed = true;
        tr.failure = e.what();
    }
    tr.accepted_steps = stepper.accepted_steps();
    tr.halvings = stepper.halvings();
    return tr;
}

Trajectory<EnsState> integrate_pair(const EnsState& ens0, const KsnsState& ksns0, const StepperConfig& cfg,
                                    const ThresholdConfig& threshold, const EnsOptions& opt, const PairHook& hook,
                                    bool store_states)
{
    const auto times = cfg.output_times();
    Trajectory<EnsState> tr;
    EnsStepper es(ens0.grid(), ens0.epsilon, ens0.mu, opt);
    KsnsStepper ks(ksns0.grid(), ksns0.mu, opt.disable_nonlinear);
    DiagnosticsAccumulator acc(ens0.grid(), threshold);
    EnsState e = ens0;
    KsnsState k = ksns0;
    auto emit = [&](double t) {
        tr.times.push_back(t);
        if (store_states) tr.states.push_back(e);
        tr.diagnostics.push_back(acc.push(t, e, k));
        if (hook) hook(t, e, k);
    };
    try {
        emit(0.0);
        for (std::size_t i = 1; i < times.size(); ++i) {
            advance_to(times[i - 1], times[i], cfg.dt, [&](double h) {
                e = es.step(e, h, cfg);
                k = ks.step(k, h, cfg);
            });
            emit(times[i]);
        }
    } catch (const NumericalError& err) {
        tr.failed = true;
        tr.failure = err.what();
    }
    tr.accepted_steps = es.accepted_steps();
    tr.halvings = es.halvings();
    return tr;
}

} // namespace relaxflow
