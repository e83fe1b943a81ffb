#include "relaxflow/initial_data.hpp"

#include "relaxflow/errors.hpp"
#include "relaxflow/spectral_ops.hpp"

#include <cmath>
#include <numbers>

namespace relaxflow {

SpectralField random_band_limited(const Grid& grid, int components, const SpectrumShape& shape,
                                  std::mt19937_64& rng)
{
    if (!(shape.k_cutoff >= 1.0)) throw ConfigError("spectral cutoff must be >= 1");
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    const double power = -(shape.sigma1 + 0.5 * grid.dim());
    const double kc2 = shape.k_cutoff * shape.k_cutoff;
    SpectralField f(grid, components);
    int k[3];
    for (int c = 0; c < components; ++c) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const std::size_t m = grid.mirror(i);
            if (m <= i || !grid.dealiased_keep(i)) continue;
            grid.wavenumbers(i, k);
            double k2 = 0.0;
            for (int d = 0; d < grid.dim(); ++d) k2 += double(k[d]) * k[d];
            if (k2 > kc2) continue;
            const Complex v = std::polar(std::pow(k2, 0.5 * power), phase(rng));
            f[c][i] = v;
            f[c][m] = std::conj(v);
        }
    }
    return f;
}

InitialData generate_initial_data(const Grid& grid, const InitialDataConfig& cfg)
{
    std::mt19937_64 rng(cfg.seed);
    InitialData data{KsnsState::zero(grid, cfg.mu), SpectralField::vector(grid)};
    data.limit.a = random_band_limited(grid, 1, cfg.shape, rng);
    data.limit.u = project_leray(random_band_limited(grid, grid.dim(), cfg.shape, rng));
    data.w0 = random_band_limited(grid, grid.dim(), cfg.shape, rng);

    // Every term of E0 + dE0 is homogeneous of degree one in the common
    // amplitude when rho0 = rho0* and u0 = u0*.
    const DyadicDecomposition lp(grid);
    const ThresholdConfig th{cfg.epsilon_ref, cfg.m0};
    const double unit = initial_energy(lp, data.limit) +
                        initial_error_energy(lp, ill_prepared(data, cfg.epsilon_ref), data.limit, th);
    if (!(unit > 0.0)) throw ConfigError("initial data spectrum is empty");
    data.amplitude = cfg.target_energy / unit;
    data.limit.a *= data.amplitude;
    data.limit.u *= data.amplitude;
    data.w0 *= data.amplitude;
    data.energy = cfg.target_energy;
    check_density_floor(to_physical(data.limit.a));
    return data;
}

EnsState ill_prepared(const InitialData& data, double epsilon)
{
    return EnsState{data.limit.a, data.w0, data.limit.u, epsilon, data.limit.mu};
}

EnsState prepared(const KsnsState& limit, double epsilon)
{
    SpectralField w = darcy_velocity(limit);
    w *= epsilon;
    return EnsState{limit.a, w, limit.u, epsilon, limit.mu};
}

} // namespace relaxflow
