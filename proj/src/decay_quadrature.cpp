#include "relaxflow/decay_quadrature.hpp"

#include "relaxflow/errors.hpp"
#include "relaxflow/fit.hpp"
#include "relaxflow/littlewood_paley.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>

namespace relaxflow {

namespace {

// Gauss-Kronrod 7/15 on [-1, 1]; Gauss nodes are the odd-indexed Kronrod nodes.
constexpr std::array<double, 8> kXgk = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                        0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr int kMaxDepth = 40;

using Integrand = std::function<double(double)>;

struct Rule {
    double kronrod;
    double error;
};

Rule gauss_kronrod(const Integrand& f, double a, double b)
{
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(c);
    double k = kWgk[7] * fc, g = kWg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double x = h * kXgk[static_cast<std::size_t>(i)];
        const double s = f(c - x) + f(c + x);
        k += kWgk[static_cast<std::size_t>(i)] * s;
        if (i % 2 == 1) g += kWg[static_cast<std::size_t>(i / 2)] * s;
    }
    return {k * h, std::abs((k - g) * h)};
}

// Bisect until the Kronrod/Gauss gap is below tol_density per unit length
// or at the rounding level of the panel.
double adapt(const Integrand& f, double a, double b, double tol_density, int depth)
{
    const Rule r = gauss_kronrod(f, a, b);
    const double roundoff = 50.0 * std::numeric_limits<double>::epsilon() * std::abs(r.kronrod);
    if (r.error <= std::max(tol_density * (b - a), roundoff)) return r.kronrod;
    if (depth >= kMaxDepth) throw NumericalError("adaptive quadrature did not converge");
    const double m = 0.5 * (a + b);
    return adapt(f, a, m, tol_density, depth + 1) + adapt(f, m, b, tol_density, depth + 1);
}

// Adaptive integral over unit panels of [a, b].
double integrate_panels(const Integrand& f, double a, double b, double rtol)
{
    std::vector<double> edges{a};
    while (edges.back() + 1.0 < b) edges.push_back(edges.back() + 1.0);
    edges.push_back(b);
    double estimate = 0.0;
    for (std::size_t i = 1; i < edges.size(); ++i) estimate += std::abs(gauss_kronrod(f, edges[i - 1], edges[i]).kronrod);
    if (estimate == 0.0) return 0.0;
    const double tol_density = 0.1 * rtol * estimate / (b - a);
    double total = 0.0;
    for (std::size_t i = 1; i < edges.size(); ++i) total += adapt(f, edges[i - 1], edges[i], tol_density, 0);
    return total;
}

std::array<double, 2> row_of(const DecayQuery& q)
{
    switch (q.component) {
    case Component::Density: return {1.0, 0.0};
    case Component::CompressibleVelocity: return {0.0, 1.0};
    case Component::Pw: return {1.0, 0.0};
    case Component::U: return {0.0, 1.0};
    case Component::R: return {1.0, -q.epsilon};
    }
    return {1.0, 0.0};
}

bool belongs_to_B1(Component c) { return c == Component::Density || c == Component::CompressibleVelocity; }

} // namespace

// ============================================================================
// Profiles and names
// ============================================================================

void RadialProfile::validate() const
{
    if (d < 2) throw ConfigError("profile dimension must be >= 2");
    if (kind == Kind::Power) {
        if (!(sigma1 >= -0.5 * d - 1.0 - 1e-12 && sigma1 < 0.5 * d - 1.0))
            throw ConfigError("sigma1 must lie in [-d/2 - 1, d/2 - 1)");
        if (!(cutoff_hi > 0.0)) throw ConfigError("cutoff_hi must be positive");
    }
}

double RadialProfile::amplitude(double xi) const
{
    if (kind == Kind::Gaussian) return std::exp(-xi * xi);
    if (xi > cutoff_hi || xi <= 0.0) return 0.0;
    return std::pow(xi, -(sigma1 + 0.5 * d));
}

double RadialProfile::small_xi_exponent(double sigma) const
{
    return kind == Kind::Gaussian ? 2.0 * sigma + d : 2.0 * (sigma - sigma1);
}

RadialProfile RadialProfile::lower_regularity() const
{
    RadialProfile p = *this;
    p.sigma1 -= 1.0;
    return p;
}

std::string to_string(SymbolKind s)
{
    switch (s) {
    case SymbolKind::Heat: return "heat";
    case SymbolKind::B1: return "B1";
    case SymbolKind::B2: return "B2";
    }
    return "?";
}

std::string to_string(Component c)
{
    switch (c) {
    case Component::Density: return "density";
    case Component::CompressibleVelocity: return "compressible_velocity";
    case Component::Pw: return "Pw";
    case Component::U: return "u";
    case Component::R: return "R";
    }
    return "?";
}

SymbolKind parse_symbol(const std::string& s)
{
    for (auto k : {SymbolKind::Heat, SymbolKind::B1, SymbolKind::B2})
        if (to_string(k) == s) return k;
    throw ConfigError("unknown symbol '" + s + "'");
}

Component parse_component(const std::string& s)
{
    for (auto c : {Component::Density, Component::CompressibleVelocity, Component::Pw, Component::U, Component::R})
        if (to_string(c) == s) return c;
    throw ConfigError("unknown component '" + s + "'");
}

// ============================================================================
// Quadrature
// ============================================================================

double green_row_energy(const DecayQuery& q, double xi, double t)
{
    if (q.symbol == SymbolKind::Heat) return std::exp(-2.0 * t * xi * xi);
    if (belongs_to_B1(q.component) != (q.symbol == SymbolKind::B1))
        throw ConfigError("component " + to_string(q.component) + " does not belong to " + to_string(q.symbol));
    const SymbolPoint p{xi, q.epsilon, q.mu, 2};
    const Mat2 G = q.symbol == SymbolKind::B1 ? propagator_B1(p, t) : propagator_B2(p, t);
    const auto r = row_of(q);
    return std::norm(r[0] * G(0, 0) + r[1] * G(1, 0)) + std::norm(r[0] * G(0, 1) + r[1] * G(1, 1));
}

double semigroup_norm(const RadialProfile& profile, const DecayQuery& q, double t, double rtol)
{
    profile.validate();
    if (!(t >= 0.0)) throw ConfigError("semigroup_norm needs t >= 0");
    const double p = profile.small_xi_exponent(q.sigma);
    if (!(p > 0.0)) throw ConfigError("small-frequency integral diverges: need sigma > sigma1");

    const double xi_lo = 1e-4 / std::sqrt(std::max(t, 1.0));
    const double xi_hi = profile.kind == RadialProfile::Kind::Gaussian ? 9.0 : profile.cutoff_hi;
    if (!(xi_hi > xi_lo)) throw ConfigError("profile cutoff is below the quadrature floor");

    const int d = profile.d;
    const Integrand f = [&](double s) {
        const double xi = std::exp(s);
        const double amp = profile.amplitude(xi);
        return std::pow(xi, 2.0 * q.sigma + d) * green_row_energy(q, xi, t) * amp * amp;
    };
    const double body = integrate_panels(f, std::log(xi_lo), std::log(xi_hi), rtol);
    // Below xi_lo: |f|^2 xi^{d+2sigma} ~ xi^p and G(t, xi) ~ G(t, 0).
    const double tail = green_row_energy(q, 0.0, t) * std::pow(xi_lo, p) / p;
    return std::sqrt(body + tail);
}

DecayFit fit_decay(const RadialProfile& profile, const DecayQuery& q, double t_lo, double t_hi, int samples,
                   double rtol)
{
    if (!(t_lo > 0.0) || !(t_hi >= 10.0 * t_lo)) throw ConfigError("decay window needs t_hi >= 10 t_lo > 0");
    if (samples < 3) throw ConfigError("decay fit needs at least three samples");
    DecayFit out;
    out.sigma = q.sigma;
    out.t_lo = t_lo;
    out.t_hi = t_hi;
    for (int i = 0; i < samples; ++i) {
        const double t = t_lo * std::pow(t_hi / t_lo, double(i) / (samples - 1));
        out.times.push_back(t);
        out.norms.push_back(semigroup_norm(profile, q, t, rtol));
    }
    const SlopeFit f = fit_slope(out.times, out.norms);
    out.slope = f.slope;
    out.intercept = f.intercept;
    out.r2 = f.r2;
    out.stderr_slope = f.stderr_slope;
    return out;
}

double profile_block_norm(const RadialProfile& profile, int j)
{
    profile.validate();
    const double scale = std::ldexp(1.0, j);
    const double lo = 0.75 * scale;
    double hi = 8.0 / 3.0 * scale;
    if (profile.kind == RadialProfile::Kind::Power) hi = std::min(hi, profile.cutoff_hi);
    if (!(hi > lo)) return 0.0;
    const int d = profile.d;
    const Integrand f = [&](double xi) {
        const double w = dyadic_bump(xi / scale);
        const double amp = profile.amplitude(xi);
        return w * w * amp * amp * std::pow(xi, d - 1);
    };
    // Panels of width one in units of the block scale.
    const Integrand g = [&](double s) { return scale * f(scale * s); };
    return std::sqrt(integrate_panels(g, lo / scale, hi / scale, 1e-10));
}

} // namespace relaxflow
