#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace relaxflow {

/// Flat experiment configuration. Every key is optional in the JSON file;
/// unknown keys are rejected.
struct ExperimentConfig {
    std::string kind = "converge";

    // grid
    int dim = 2;
    int n = 128;
    double length = 6.283185307179586;

    // stepper
    double dt = 0.01;
    double t_end = 2.0;
    double output_stride = 50.0;
    double cfl_safety = 0.5;
    int max_halvings = 20;
    /// Geometric initial-layer output samples eps^2 * [layer_lo, layer_hi]; 0 disables.
    int layer_samples = 40;
    double layer_lo = 1e-2;
    double layer_hi = 30.0;

    // physics and data
    std::vector<double> epsilon_list{0.2, 0.1, 0.05, 0.025};
    double epsilon_ceiling = 0.25;
    double mu = 1.0;
    int m0 = 2;
    double sigma1 = -1.0;
    double k_cutoff = 2.0;
    double target_energy = 0.01;
    /// Multiplies the data after the E0 + dE0 normalization (amplitude sweeps).
    double amplitude_factor = 1.0;
    /// "ill_prepared" or "prepared".
    std::string data = "ill_prepared";
    bool freeze_u = false;
    bool disable_nonlinear = false;
    bool limit_symbols = false;
    std::uint64_t seed = 20240601;

    // spectrum sweep
    double xi_min = 1e-3;
    double xi_max = 1e3;
    int xi_samples = 121;

    // decay fits
    std::vector<double> sigma_list{0.0, 0.5, 1.0};
    std::vector<double> decay_epsilon_list{0.2, 0.1, 0.05};
    double t_lo = 10.0;
    double t_hi = 1000.0;
    int decay_samples = 40;
    double cutoff_hi = 10.0;

    // output
    std::string output_dir = "relaxflow_out";
    int threads = 1;
    bool snapshots = true;

    /// Throws ConfigError on any violated invariant.
    void validate() const;

    bool operator==(const ExperimentConfig&) const = default;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Keys absent from j keep their defaults; unknown keys throw ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

const std::vector<std::string>& experiment_kinds();

} // namespace relaxflow
