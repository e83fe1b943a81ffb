#pragma once

#include "relaxflow/spectral_field.hpp"

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace relaxflow {

/// Radial profile used as a multiplier, evaluated at |xi|.
using RadialFunction = std::function<double(double)>;

/// The low-frequency cutoff chi: equal to 1 on |xi| <= 3/4, 0 on |xi| >= 4/3,
/// with the C-infinity transition 1 - psi(s), psi(s) = e^{-1/s} / (e^{-1/s} + e^{-1/(1-s)}).
double smooth_cutoff(double r);
/// phi(r) = chi(r/2) - chi(r), supported in [3/4, 8/3].
double dyadic_bump(double r);

enum class SumExponent { One, Infinity };
enum class Band { All, Low, High };

/// Relaxation threshold J_eps = -floor(log2 eps) - m0.
struct ThresholdConfig {
    double epsilon = 0.1;
    int m0 = 2;

    int J() const;
};

/// s: regularity index; r: summation exponent; band selects j <= J (low)
/// or j >= J - 1 (high), J taken from the ThresholdConfig.
struct BesovSpec {
    double s = 0.0;
    SumExponent r = SumExponent::One;
    Band band = Band::All;
};

/// L2 norms of the dyadic blocks j = j_min .. j_max of one field.
struct BlockNorms {
    int j_min = 0;
    std::vector<double> values;

    int j_max() const { return j_min + static_cast<int>(values.size()) - 1; }
    double at(int j) const { return values[static_cast<std::size_t>(j - j_min)]; }
};

/// Littlewood-Paley decomposition restricted to the blocks the grid resolves.
///
/// On the torus the smallest nonzero frequency is 2*pi/L, so
/// j_min = floor(log2(3/4 * 2*pi/L)) and j_max = ceil(log2(4/3 * max|xi|)) - 1;
/// with these bounds sum_j phi(2^-j xi) = 1 for every stored xi != 0.
class DyadicDecomposition {
public:
    explicit DyadicDecomposition(const Grid& grid);
    /// Custom profiles (used by the self-test negative controls).
    DyadicDecomposition(const Grid& grid, RadialFunction chi, RadialFunction phi);

    const Grid& grid() const { return grid_; }
    int j_min() const { return j_min_; }
    int j_max() const { return j_max_; }

    double block_multiplier(int j, double xi_norm) const;
    /// chi(2^-J |xi|), the symbol of S_J.
    double low_multiplier(int J, double xi_norm) const;

    /// max over stored xi != 0 of |sum_j phi(2^-j xi) - 1|.
    double partition_defect() const;

    /// Delta_j f. Throws ConfigError outside [j_min, j_max].
    SpectralField block(const SpectralField& f, int j) const;
    BlockNorms block_norms(const SpectralField& f) const;

    double besov_norm(const SpectralField& f, const BesovSpec& spec,
                      std::optional<ThresholdConfig> threshold = std::nullopt) const;

    /// (low, high) with low = S_J f (mean included), high = f - low.
    std::pair<SpectralField, SpectralField> split_low_high(const SpectralField& f,
                                                           const ThresholdConfig& threshold) const;

    /// Norm of the sum space B^{s_low} + B^{s_high} (r = 1), taken as the
    /// minimum of ||f_low||_{s_low} + ||f_high||_{s_high} over every threshold split.
    double sum_space_norm(const SpectralField& f, double s_low, double s_high) const;

    /// Throws ConfigError if J is outside [j_min, j_max + 1].
    void check_threshold(int J) const;

private:
    Grid grid_;
    RadialFunction chi_;
    RadialFunction phi_;
    int j_min_ = 0;
    int j_max_ = 0;
};

/// Aggregate block norms into a Besov norm; J is required unless band == All.
double besov_from_blocks(const BlockNorms& blocks, const BesovSpec& spec, std::optional<int> J = std::nullopt);

/// Time exponent of a Chemin-Lerner norm.
enum class TimeExponent { One, Two, Infinity };

/// Chemin-Lerner norm: time-L^rho (trapezoidal) of every block, then weighted ell^r.
/// rho = One/Two need at least two samples; rho = Infinity accepts one.
double chemin_lerner_norm(std::span<const BlockNorms> series, std::span<const double> times,
                          const BesovSpec& spec, TimeExponent rho, std::optional<int> J = std::nullopt);
double chemin_lerner_norm(const DyadicDecomposition& lp, std::span<const SpectralField> series,
                          std::span<const double> times, const BesovSpec& spec, TimeExponent rho,
                          std::optional<ThresholdConfig> threshold = std::nullopt);

/// Time-outside norm ||t -> values(t)||_{L^rho(0,T)} with trapezoidal quadrature.
double time_norm(std::span<const double> values, std::span<const double> times, TimeExponent rho);

/// Second-order finite-difference time derivative of a snapshot series
/// (one-sided at the ends). An alternative to evaluating the right-hand side.
std::vector<SpectralField> finite_difference_derivative(std::span<const SpectralField> series,
                                                        std::span<const double> times);

} // namespace relaxflow
