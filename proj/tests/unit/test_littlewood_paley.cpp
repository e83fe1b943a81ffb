#include "oracles.hpp"

#include "relaxflow/errors.hpp"
#include "relaxflow/littlewood_paley.hpp"

#include <doctest.h>

using namespace relaxflow;

namespace {

const double kL = 2.0 * M_PI;

// Definition evaluated mode by mode over every block, no support pruning.
double besov_direct(const DyadicDecomposition& lp, const SpectralField& f, double s)
{
    const Grid& g = f.grid();
    double acc = 0.0;
    for (int j = lp.j_min(); j <= lp.j_max(); ++j) {
        double e = 0.0;
        for (std::size_t i = 1; i < g.size(); ++i) {
            const double w = dyadic_bump(std::ldexp(std::sqrt(g.frequency_norm_sq(i)), -j));
            for (int c = 0; c < f.components(); ++c) e += w * w * std::norm(f[c][i]);
        }
        acc += std::pow(2.0, j * s) * std::sqrt(g.volume() * e);
    }
    return acc;
}

SpectralField single_mode(const Grid& g, int k0, int k1, double amp = 1.0)
{
    SpectralField f = SpectralField::scalar(g);
    const int k[2] = {k0, k1}, m[2] = {-k0, -k1};
    f[0][g.flat_index(k)] = amp;
    f[0][g.flat_index(m)] = amp;
    return f;
}

} // namespace

TEST_CASE("cutoff and bump profiles")
{
    CHECK(smooth_cutoff(0.0) == 1.0);
    CHECK(smooth_cutoff(0.75) == 1.0);
    CHECK(smooth_cutoff(4.0 / 3.0) == 0.0);
    CHECK(smooth_cutoff(1.0) > 0.0);
    CHECK(smooth_cutoff(1.0) < 1.0);
    for (double r = 0.0; r < 4.0; r += 0.01) {
        CHECK(dyadic_bump(r) >= 0.0);
        CHECK(dyadic_bump(r) <= 1.0);
        if (r <= 0.75 || r >= 8.0 / 3.0) CHECK(dyadic_bump(r) == 0.0);
    }
    double prev = 1.0;
    for (double r = 0.7; r < 1.4; r += 0.001) {
        CHECK(smooth_cutoff(r) <= prev);
        prev = smooth_cutoff(r);
    }
}

TEST_CASE("threshold index")
{
    CHECK(ThresholdConfig{1.0 / 64.0, 2}.J() == 4);
    CHECK(ThresholdConfig{0.1, 2}.J() == 2);
    CHECK(ThresholdConfig{0.2, 2}.J() == 1);
    CHECK(ThresholdConfig{1.0, 0}.J() == 0);
    CHECK_THROWS_AS((ThresholdConfig{0.0, 2}.J()), ConfigError);
    CHECK_THROWS_AS((ThresholdConfig{1.5, 2}.J()), ConfigError);
}

TEST_CASE("resolvable block range and partition of unity")
{
    for (double L : {kL, 3.0, 10.0}) {
        for (int n : {8, 32, 128}) {
            const Grid g(2, n, L);
            const DyadicDecomposition lp(g);
            CHECK(lp.j_min() == static_cast<int>(std::floor(std::log2(0.75 * g.base_frequency()))));
            CHECK(lp.j_max() == static_cast<int>(std::ceil(std::log2(4.0 / 3.0 * g.max_frequency()))) - 1);
            CHECK(lp.partition_defect() <= 1e-12);
        }
    }
}

TEST_CASE("blocks reconstruct mean-zero fields")
{
    const Grid g(2, 64, kL);
    const DyadicDecomposition lp(g);
    SpectralField f = oracle::random_field(g, 2, 21, 1.0, 20.0);
    f[0][0] = f[1][0] = 0.0;
    SpectralField sum = SpectralField::vector(g);
    for (int j = lp.j_min(); j <= lp.j_max(); ++j) sum += lp.block(f, j);
    CHECK(max_abs_diff(sum, f) <= 1e-10 * f.max_abs());
    CHECK_THROWS_AS(lp.block(f, lp.j_min() - 1), ConfigError);
    CHECK_THROWS_AS(lp.block(f, lp.j_max() + 1), ConfigError);

    const SpectralField z = SpectralField::scalar(g);
    for (int j = lp.j_min(); j <= lp.j_max(); ++j) CHECK(lp.block(z, j).max_abs() == 0.0);
}

TEST_CASE("annulus-localized field lives in one block")
{
    // 2^-2 * 6 = 1.5 lies where the bump equals one.
    const Grid g(2, 32, kL);
    const DyadicDecomposition lp(g);
    const SpectralField f = single_mode(g, 6, 0);
    for (int j = lp.j_min(); j <= lp.j_max(); ++j) {
        const double n = l2_norm(lp.block(f, j));
        if (j == 2) CHECK(n == doctest::Approx(l2_norm(f)).epsilon(1e-14));
        else CHECK(n == 0.0);
    }
}

TEST_CASE("Besov norm of a block-0 field")
{
    // Base frequency 1.4 sits inside the flat part of the j = 0 bump.
    const Grid g(2, 16, 2.0 * M_PI / 1.4);
    const DyadicDecomposition lp(g);
    SpectralField f = single_mode(g, 1, 0);
    f *= 1.0 / l2_norm(f);
    CHECK(lp.besov_norm(f, {0.0}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(lp.besov_norm(f, {2.0}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(lp.besov_norm(f, {2.0, SumExponent::Infinity}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(lp.besov_norm(SpectralField::scalar(g), {1.3}) == 0.0);
}

TEST_CASE("Besov norm matches the direct definition")
{
    const Grid g(2, 32, 3.0);
    const DyadicDecomposition lp(g);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const SpectralField f = oracle::random_field(g, 1, seed, 1.0, 9.0);
        for (double s : {-1.0, 0.0, 0.5, 2.0}) {
            const double ref = besov_direct(lp, f, s);
            CHECK(lp.besov_norm(f, {s}) == doctest::Approx(ref).epsilon(1e-12));
        }
    }
    // A mode near the j = 0 / j = 1 boundary splits across both blocks.
    const Grid h(2, 16, 2.0 * M_PI / 1.9);
    const DyadicDecomposition lh(h);
    SpectralField f = single_mode(h, 1, 0);
    const double n2 = lh.besov_norm(f, {2.0});
    CHECK(n2 >= 0.25 * l2_norm(f));
    CHECK(n2 <= 4.0 * 2.0 * l2_norm(f));
    CHECK(n2 == doctest::Approx(besov_direct(lh, f, 2.0)).epsilon(1e-12));
}

TEST_CASE("low/high bands")
{
    const Grid g(2, 128, kL);
    const DyadicDecomposition lp(g);
    const ThresholdConfig th{1.0 / 64.0, 2};
    REQUIRE(th.J() == 4);
    const SpectralField f = oracle::random_field(g, 1, 31, 1.0, 40.0);

    auto [low, high] = lp.split_low_high(f, th);
    CHECK(max_abs_diff(low + high, f) <= 1e-10 * f.max_abs());
    const BlockNorms bl = lp.block_norms(low), bh = lp.block_norms(high);
    for (int j = lp.j_min(); j <= lp.j_max(); ++j) {
        if (j >= th.J() + 1) CHECK(bl.at(j) == 0.0);
        if (j <= th.J() - 2) CHECK(bh.at(j) == 0.0);
    }

    // The mode |k| = 3 lies wholly in block 1 = J - 3.
    auto [l2, h2] = lp.split_low_high(single_mode(g, 3, 0), th);
    CHECK(h2.max_abs() == 0.0);

    for (double s : {0.0, 1.0}) {
        const double all = lp.besov_norm(f, {s});
        const double lo = lp.besov_norm(f, {s, SumExponent::One, Band::Low}, th);
        const double hi = lp.besov_norm(f, {s, SumExponent::One, Band::High}, th);
        CHECK(lo + hi >= all * (1.0 - 1e-14));
        CHECK(lo + hi <= 2.0 * all);
    }
    CHECK_THROWS_AS(lp.besov_norm(f, {0.0, SumExponent::One, Band::Low}), ConfigError);
    CHECK_THROWS_AS(lp.check_threshold(lp.j_max() + 2), ConfigError);
}

TEST_CASE("low part obeys the frequency-threshold Bernstein bound")
{
    const Grid g(2, 64, kL);
    const DyadicDecomposition lp(g);
    const ThresholdConfig th{0.05, 2};
    for (std::uint64_t seed = 40; seed < 60; ++seed) {
        const SpectralField low = lp.split_low_high(oracle::random_field(g, 1, seed, 1.0, 20.0), th).first;
        for (double s : {0.0, 1.0, 2.0})
            for (double sp : {0.5, 1.0}) {
                const double lhs = lp.besov_norm(low, {s});
                const double rhs = std::pow(2.0, th.J() * sp) * lp.besov_norm(low, {s - sp});
                CHECK(lhs <= rhs * (1.0 + 1e-12));
            }
    }
}

TEST_CASE("Bernstein ring bounds per block")
{
    for (double L : {kL, 3.0}) {
        const Grid g(2, 64, L);
        const DyadicDecomposition lp(g);
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const SpectralField f = oracle::random_field(g, 1, seed, 1.0, 21.0, 0.0);
            for (int j = lp.j_min(); j <= lp.j_max(); ++j) {
                const SpectralField b = lp.block(f, j);
                const double nb = l2_norm(b);
                if (nb == 0.0) continue;
                const double ratio = l2_norm(gradient(b)) / nb;
                CHECK(ratio >= 0.75 * std::ldexp(1.0, j) * (1.0 - 1e-12));
                CHECK(ratio <= 8.0 / 3.0 * std::ldexp(1.0, j) * (1.0 + 1e-12));
            }
        }
    }
}

TEST_CASE("interpolation inequality on random fields")
{
    const Grid g(2, 64, kL);
    const DyadicDecomposition lp(g);
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double s1 = -1.0 + U(rng), s2 = s1 + 0.5 + 2.0 * U(rng);
        const double theta = 0.1 + 0.8 * U(rng);
        const double s = theta * s1 + (1.0 - theta) * s2;
        const SpectralField f = oracle::random_field(g, 1, rng(), 1.0, 1.0 + 20.0 * U(rng), -1.0 + 2.0 * U(rng));
        const double K = 10.0 * 4.0 / (theta * (1.0 - theta) * (s2 - s1));
        const double lhs = lp.besov_norm(f, {s});
        const double rhs = K * std::pow(lp.besov_norm(f, {s1, SumExponent::Infinity}), theta) *
                           std::pow(lp.besov_norm(f, {s2, SumExponent::Infinity}), 1.0 - theta);
        CHECK(lhs <= rhs);
    }
}

TEST_CASE("sum-space norm is bounded by either pure norm")
{
    const Grid g(2, 64, kL);
    const DyadicDecomposition lp(g);
    const SpectralField f = oracle::random_field(g, 2, 5, 1.0, 20.0);
    const double sum = lp.sum_space_norm(f, 1.0, 2.0);
    CHECK(sum <= lp.besov_norm(f, {1.0}) * (1.0 + 1e-12));
    CHECK(sum <= lp.besov_norm(f, {2.0}) * (1.0 + 1e-12));
    CHECK(sum > 0.0);
    CHECK(lp.sum_space_norm(SpectralField::vector(g), 1.0, 2.0) == 0.0);
}

TEST_CASE("Chemin-Lerner norms")
{
    const Grid g(2, 32, kL);
    const DyadicDecomposition lp(g);
    const SpectralField f0 = oracle::random_field(g, 1, 3, 1.0, 9.0);
    const BesovSpec spec{0.5};
    const double b = lp.besov_norm(f0, spec);

    const double T = 2.0, dt = 1e-3;
    const int n = static_cast<int>(std::lround(T / dt)) + 1;
    std::vector<double> times(n);
    std::vector<SpectralField> constant, decaying;
    for (int i = 0; i < n; ++i) {
        times[i] = i * dt;
        constant.push_back(f0);
        decaying.push_back(std::exp(-times[i]) * f0);
    }
    CHECK(chemin_lerner_norm(lp, constant, times, spec, TimeExponent::Infinity) == doctest::Approx(b).epsilon(1e-14));
    CHECK(chemin_lerner_norm(lp, constant, times, spec, TimeExponent::One) == doctest::Approx(T * b).epsilon(1e-12));
    const double cl1 = chemin_lerner_norm(lp, decaying, times, spec, TimeExponent::One);
    CHECK(std::abs(cl1 / b - (1.0 - std::exp(-T))) <= 1e-3);

    // Minkowski: equality for rho = r = 1, CL below the time-outside sup for rho = infinity.
    std::vector<double> norms;
    for (const auto& f : decaying) norms.push_back(lp.besov_norm(f, spec));
    CHECK(cl1 == doctest::Approx(time_norm(norms, times, TimeExponent::One)).epsilon(1e-12));
    std::vector<SpectralField> mixed;
    for (int i = 0; i < n; ++i) {
        SpectralField f = lp.block(f0, 0);
        f *= std::cos(3.0 * times[i]);
        f.axpy(std::sin(3.0 * times[i]), lp.block(f0, 2));
        mixed.push_back(f);
    }
    std::vector<double> mnorms;
    for (const auto& f : mixed) mnorms.push_back(lp.besov_norm(f, spec));
    CHECK(chemin_lerner_norm(lp, mixed, times, spec, TimeExponent::Infinity) >=
          time_norm(mnorms, times, TimeExponent::Infinity));

    // One sample is enough only for rho = infinity.
    const std::vector<SpectralField> one{f0};
    const std::vector<double> t0{0.0};
    CHECK(chemin_lerner_norm(lp, one, t0, spec, TimeExponent::Infinity) == doctest::Approx(b));
    CHECK_THROWS_AS(chemin_lerner_norm(lp, one, t0, spec, TimeExponent::One), ConfigError);
    const std::vector<double> bad{0.0, 0.0};
    const std::vector<SpectralField> two{f0, f0};
    CHECK_THROWS_AS(chemin_lerner_norm(lp, two, bad, spec, TimeExponent::Two), ConfigError);
}

TEST_CASE("time norms and finite-difference derivative")
{
    std::vector<double> t, y;
    for (int i = 0; i <= 200; ++i) {
        t.push_back(0.01 * i);
        y.push_back(std::exp(-t.back()));
    }
    CHECK(time_norm(y, t, TimeExponent::One) == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-4));
    CHECK(time_norm(y, t, TimeExponent::Two) == doctest::Approx(std::sqrt(0.5 * (1.0 - std::exp(-4.0)))).epsilon(1e-4));
    CHECK(time_norm(y, t, TimeExponent::Infinity) == 1.0);

    const Grid g(2, 8, kL);
    const SpectralField f0 = oracle::random_field(g, 1, 4);
    double err_prev = 0.0;
    for (double h : {0.02, 0.01}) {
        std::vector<double> ts;
        std::vector<SpectralField> series;
        // Nonuniform spacing exercises the three-point weights.
        for (int i = 0; i <= 20; ++i) {
            const double ti = h * (i + 0.3 * (i % 2));
            ts.push_back(ti);
            series.push_back(std::exp(-ti) * f0);
        }
        const auto d = finite_difference_derivative(series, ts);
        double err = 0.0;
        for (std::size_t i = 0; i < ts.size(); ++i) err = std::max(err, max_abs_diff(d[i], -std::exp(-ts[i]) * f0));
        if (err_prev > 0.0) CHECK(err_prev / err > 3.5);
        err_prev = err;
    }
}
