#pragma once

#include "relaxflow/littlewood_paley.hpp"
#include "relaxflow/models.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace relaxflow {

/// Random band-limited spectrum: |f(k)| ~ |k|^-(sigma1 + d/2) for 0 < |k| <= k_cutoff
/// (integer wavenumbers), uniformly random phases, Hermitian, mean zero.
struct SpectrumShape {
    double sigma1 = -1.0;
    double k_cutoff = 2.0;
};

SpectralField random_band_limited(const Grid& grid, int components, const SpectrumShape& shape,
                                  std::mt19937_64& rng);

/// Limit data (a0*, u0*) with u0* divergence-free, plus an eps-independent
/// O(1)-shaped Euler velocity w0 for ill-prepared runs.
struct InitialData {
    KsnsState limit;
    SpectralField w0;
    /// Factor applied to the unit-shape fields.
    double amplitude = 1.0;
    /// E0 + dE0 evaluated at the reference epsilon after scaling.
    double energy = 0.0;
};

struct InitialDataConfig {
    SpectrumShape shape;
    std::uint64_t seed = 1;
    double mu = 1.0;
    /// Target for E0 + dE0 at epsilon_ref.
    double target_energy = 0.01;
    double epsilon_ref = 0.2;
    int m0 = 2;
};

InitialData generate_initial_data(const Grid& grid, const InitialDataConfig& cfg);

/// rho0 = rho0*, u0 = u0*, w0 independent of eps.
EnsState ill_prepared(const InitialData& data, double epsilon);
/// rho0 = rho0*, u0 = u0*, w0 = eps (u0 - grad a0/(1 + a0)) (Darcy-compatible).
EnsState prepared(const KsnsState& limit, double epsilon);

} // namespace relaxflow
