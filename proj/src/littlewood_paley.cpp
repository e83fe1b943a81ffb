#include "relaxflow/littlewood_paley.hpp"

#include "relaxflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace relaxflow {

namespace {

constexpr double kInner = 3.0 / 4.0;
constexpr double kOuter = 4.0 / 3.0;

double transition(double s)
{
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / s);
    const double b = std::exp(-1.0 / (1.0 - s));
    return a / (a + b);
}

bool in_band(int j, const BesovSpec& spec, std::optional<int> J)
{
    switch (spec.band) {
    case Band::All: return true;
    case Band::Low: return j <= *J;
    case Band::High: return j >= *J - 1;
    }
    return true;
}

double weighted_sum(const BlockNorms& blocks, const BesovSpec& spec, std::optional<int> J)
{
    if (spec.band != Band::All && !J)
        throw ConfigError("a low/high Besov norm needs a threshold");
    double acc = 0.0;
    for (int j = blocks.j_min; j <= blocks.j_max(); ++j) {
        if (!in_band(j, spec, J)) continue;
        const double v = std::pow(2.0, j * spec.s) * blocks.at(j);
        acc = spec.r == SumExponent::One ? acc + v : std::max(acc, v);
    }
    return acc;
}

double trapezoid(std::span<const double> y, std::span<const double> t)
{
    double s = 0.0;
    for (std::size_t i = 1; i < y.size(); ++i) s += 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
    return s;
}

void check_times(std::span<const double> times, std::size_t n, TimeExponent rho)
{
    if (times.size() != n) throw ConfigError("time samples and series lengths differ");
    if (n == 0) throw ConfigError("empty time series");
    if (rho != TimeExponent::Infinity && n < 2)
        throw ConfigError("time-integrated norms need at least two samples");
    for (std::size_t i = 1; i < n; ++i)
        if (!(times[i] > times[i - 1])) throw ConfigError("time samples must increase strictly");
}

} // namespace

double smooth_cutoff(double r)
{
    if (r <= kInner) return 1.0;
    if (r >= kOuter) return 0.0;
    return 1.0 - transition((r - kInner) / (kOuter - kInner));
}

double dyadic_bump(double r) { return smooth_cutoff(0.5 * r) - smooth_cutoff(r); }

int ThresholdConfig::J() const
{
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw ConfigError("threshold epsilon must lie in (0, 1]");
    return -static_cast<int>(std::floor(std::log2(epsilon))) - m0;
}

// ============================================================================
// DyadicDecomposition
// ============================================================================

DyadicDecomposition::DyadicDecomposition(const Grid& grid)
    : DyadicDecomposition(grid, smooth_cutoff, dyadic_bump)
{
}

DyadicDecomposition::DyadicDecomposition(const Grid& grid, RadialFunction chi, RadialFunction phi)
    : grid_(grid), chi_(std::move(chi)), phi_(std::move(phi))
{
    j_min_ = static_cast<int>(std::floor(std::log2(kInner * grid.base_frequency())));
    j_max_ = static_cast<int>(std::ceil(std::log2(kOuter * grid.max_frequency()))) - 1;
}

double DyadicDecomposition::block_multiplier(int j, double xi_norm) const
{
    return phi_(std::ldexp(xi_norm, -j));
}

double DyadicDecomposition::low_multiplier(int J, double xi_norm) const
{
    return chi_(std::ldexp(xi_norm, -J));
}

double DyadicDecomposition::partition_defect() const
{
    double worst = 0.0;
    for (std::size_t i = 1; i < grid_.size(); ++i) {
        const double r = std::sqrt(grid_.frequency_norm_sq(i));
        double s = 0.0;
        for (int j = j_min_; j <= j_max_; ++j) s += block_multiplier(j, r);
        worst = std::max(worst, std::abs(s - 1.0));
    }
    return worst;
}

SpectralField DyadicDecomposition::block(const SpectralField& f, int j) const
{
    if (j < j_min_ || j > j_max_)
        throw ConfigError("block index " + std::to_string(j) + " outside resolvable range [" +
                          std::to_string(j_min_) + ", " + std::to_string(j_max_) + "]");
    SpectralField out = f;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        const double w = i == 0 ? 0.0 : block_multiplier(j, std::sqrt(grid_.frequency_norm_sq(i)));
        for (int c = 0; c < f.components(); ++c) out[c][i] *= w;
    }
    return out;
}

BlockNorms DyadicDecomposition::block_norms(const SpectralField& f) const
{
    BlockNorms out;
    out.j_min = j_min_;
    out.values.assign(static_cast<std::size_t>(j_max_ - j_min_ + 1), 0.0);
    for (std::size_t i = 1; i < grid_.size(); ++i) {
        double e = 0.0;
        for (int c = 0; c < f.components(); ++c) e += std::norm(f[c][i]);
        if (e == 0.0) continue;
        const double r = std::sqrt(grid_.frequency_norm_sq(i));
        const int lo = std::max(j_min_, static_cast<int>(std::floor(std::log2(r * 3.0 / 8.0))));
        const int hi = std::min(j_max_, static_cast<int>(std::ceil(std::log2(r * kOuter))));
        for (int j = lo; j <= hi; ++j) {
            const double w = block_multiplier(j, r);
            if (w != 0.0) out.values[static_cast<std::size_t>(j - j_min_)] += w * w * e;
        }
    }
    const double vol = grid_.volume();
    for (auto& v : out.values) v = std::sqrt(vol * v);
    return out;
}

void DyadicDecomposition::check_threshold(int J) const
{
    if (J < j_min_ || J > j_max_ + 1)
        throw ConfigError("threshold J = " + std::to_string(J) + " outside resolvable range [" +
                          std::to_string(j_min_) + ", " + std::to_string(j_max_ + 1) + "]");
}

double DyadicDecomposition::besov_norm(const SpectralField& f, const BesovSpec& spec,
                                       std::optional<ThresholdConfig> threshold) const
{
    std::optional<int> J;
    if (spec.band != Band::All) {
        if (!threshold) throw ConfigError("a low/high Besov norm needs a threshold");
        J = threshold->J();
        check_threshold(*J);
    }
    return besov_from_blocks(block_norms(f), spec, J);
}

std::pair<SpectralField, SpectralField> DyadicDecomposition::split_low_high(const SpectralField& f,
                                                                            const ThresholdConfig& threshold) const
{
    const int J = threshold.J();
    check_threshold(J);
    SpectralField low = f;
    SpectralField high = f;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        const double w = low_multiplier(J, std::sqrt(grid_.frequency_norm_sq(i)));
        for (int c = 0; c < f.components(); ++c) {
            low[c][i] = w * f[c][i];
            high[c][i] = f[c][i] - low[c][i];
        }
    }
    return {std::move(low), std::move(high)};
}

double DyadicDecomposition::sum_space_norm(const SpectralField& f, double s_low, double s_high) const
{
    // Each mode's block norms split linearly between the two pieces, so the
    // per-threshold cost stays one pass over the modes.
    double best = std::numeric_limits<double>::infinity();
    const double vol = grid_.volume();
    const std::size_t nb = static_cast<std::size_t>(j_max_ - j_min_ + 1);
    for (int J = j_min_; J <= j_max_ + 1; ++J) {
        std::vector<double> lo(nb, 0.0), hi(nb, 0.0);
        for (std::size_t i = 1; i < grid_.size(); ++i) {
            double e = 0.0;
            for (int c = 0; c < f.components(); ++c) e += std::norm(f[c][i]);
            if (e == 0.0) continue;
            const double r = std::sqrt(grid_.frequency_norm_sq(i));
            const double wl = low_multiplier(J, r);
            const int jlo = std::max(j_min_, static_cast<int>(std::floor(std::log2(r * 3.0 / 8.0))));
            const int jhi = std::min(j_max_, static_cast<int>(std::ceil(std::log2(r * kOuter))));
            for (int j = jlo; j <= jhi; ++j) {
                const double w = block_multiplier(j, r);
                if (w == 0.0) continue;
                lo[static_cast<std::size_t>(j - j_min_)] += w * w * wl * wl * e;
                hi[static_cast<std::size_t>(j - j_min_)] += w * w * (1.0 - wl) * (1.0 - wl) * e;
            }
        }
        double total = 0.0;
        for (std::size_t b = 0; b < nb; ++b) {
            const int j = j_min_ + static_cast<int>(b);
            total += std::pow(2.0, j * s_low) * std::sqrt(vol * lo[b]);
            total += std::pow(2.0, j * s_high) * std::sqrt(vol * hi[b]);
        }
        best = std::min(best, total);
    }
    return best;
}

// ============================================================================
// Aggregation
// ============================================================================

double besov_from_blocks(const BlockNorms& blocks, const BesovSpec& spec, std::optional<int> J)
{
    return weighted_sum(blocks, spec, J);
}

double chemin_lerner_norm(std::span<const BlockNorms> series, std::span<const double> times,
                          const BesovSpec& spec, TimeExponent rho, std::optional<int> J)
{
    check_times(times, series.size(), rho);
    BlockNorms agg;
    agg.j_min = series.front().j_min;
    agg.values.assign(series.front().values.size(), 0.0);
    std::vector<double> y(series.size());
    for (std::size_t b = 0; b < agg.values.size(); ++b) {
        for (std::size_t n = 0; n < series.size(); ++n) y[n] = series[n].values[b];
        agg.values[b] = time_norm(y, times, rho);
    }
    return weighted_sum(agg, spec, J);
}

double chemin_lerner_norm(const DyadicDecomposition& lp, std::span<const SpectralField> series,
                          std::span<const double> times, const BesovSpec& spec, TimeExponent rho,
                          std::optional<ThresholdConfig> threshold)
{
    std::vector<BlockNorms> blocks;
    blocks.reserve(series.size());
    for (const auto& f : series) blocks.push_back(lp.block_norms(f));
    std::optional<int> J;
    if (threshold) {
        J = threshold->J();
        lp.check_threshold(*J);
    }
    return chemin_lerner_norm(blocks, times, spec, rho, J);
}

double time_norm(std::span<const double> values, std::span<const double> times, TimeExponent rho)
{
    check_times(times, values.size(), rho);
    switch (rho) {
    case TimeExponent::Infinity: {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }
    case TimeExponent::One: {
        std::vector<double> a(values.size());
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(values[i]);
        return trapezoid(a, times);
    }
    case TimeExponent::Two: {
        std::vector<double> a(values.size());
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = values[i] * values[i];
        return std::sqrt(trapezoid(a, times));
    }
    }
    return 0.0;
}

std::vector<SpectralField> finite_difference_derivative(std::span<const SpectralField> series,
                                                        std::span<const double> times)
{
    check_times(times, series.size(), TimeExponent::One);
    const std::size_t n = series.size();
    std::vector<SpectralField> out;
    out.reserve(n);
    auto combo = [&](std::size_t i0, double c0, std::size_t i1, double c1, std::size_t i2, double c2) {
        SpectralField r = c0 * series[i0];
        r.axpy(c1, series[i1]);
        if (c2 != 0.0) r.axpy(c2, series[i2]);
        return r;
    };
    if (n == 2) {
        const double h = times[1] - times[0];
        out.push_back(combo(0, -1.0 / h, 1, 1.0 / h, 1, 0.0));
        out.push_back(out.front());
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t a = i == 0 ? 0 : (i == n - 1 ? n - 3 : i - 1);
        const double t0 = times[a], t1 = times[a + 1], t2 = times[a + 2], t = times[i];
        // Derivative of the quadratic through (t0, t1, t2) at t.
        const double c0 = ((t - t1) + (t - t2)) / ((t0 - t1) * (t0 - t2));
        const double c1 = ((t - t0) + (t - t2)) / ((t1 - t0) * (t1 - t2));
        const double c2 = ((t - t0) + (t - t1)) / ((t2 - t0) * (t2 - t1));
        out.push_back(combo(a, c0, a + 1, c1, a + 2, c2));
    }
    return out;
}

} // namespace relaxflow
