#include "relaxflow/config.hpp"

#include "relaxflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>

namespace relaxflow {

namespace {

using json = nlohmann::json;

// One accessor per key: write into json, read from json.
struct Field {
    std::function<void(const ExperimentConfig&, json&)> put;
    std::function<void(ExperimentConfig&, const json&)> get;
};

template <class T>
Field field(const char* key, T ExperimentConfig::*member)
{
    return Field{[=](const ExperimentConfig& c, json& j) { j[key] = c.*member; },
                 [=](ExperimentConfig& c, const json& v) {
                     try {
                         c.*member = v.get<T>();
                     } catch (const json::exception& e) {
                         throw ConfigError(std::string("config key '") + key + "': " + e.what());
                     }
                 }};
}

const std::map<std::string, Field>& fields()
{
    static const std::map<std::string, Field> f = {
        {"kind", field("kind", &ExperimentConfig::kind)},
        {"dim", field("dim", &ExperimentConfig::dim)},
        {"n", field("n", &ExperimentConfig::n)},
        {"length", field("length", &ExperimentConfig::length)},
        {"dt", field("dt", &ExperimentConfig::dt)},
        {"t_end", field("t_end", &ExperimentConfig::t_end)},
        {"output_stride", field("output_stride", &ExperimentConfig::output_stride)},
        {"cfl_safety", field("cfl_safety", &ExperimentConfig::cfl_safety)},
        {"max_halvings", field("max_halvings", &ExperimentConfig::max_halvings)},
        {"layer_samples", field("layer_samples", &ExperimentConfig::layer_samples)},
        {"layer_lo", field("layer_lo", &ExperimentConfig::layer_lo)},
        {"layer_hi", field("layer_hi", &ExperimentConfig::layer_hi)},
        {"epsilon_list", field("epsilon_list", &ExperimentConfig::epsilon_list)},
        {"epsilon_ceiling", field("epsilon_ceiling", &ExperimentConfig::epsilon_ceiling)},
        {"mu", field("mu", &ExperimentConfig::mu)},
        {"m0", field("m0", &ExperimentConfig::m0)},
        {"sigma1", field("sigma1", &ExperimentConfig::sigma1)},
        {"k_cutoff", field("k_cutoff", &ExperimentConfig::k_cutoff)},
        {"target_energy", field("target_energy", &ExperimentConfig::target_energy)},
        {"amplitude_factor", field("amplitude_factor", &ExperimentConfig::amplitude_factor)},
        {"data", field("data", &ExperimentConfig::data)},
        {"freeze_u", field("freeze_u", &ExperimentConfig::freeze_u)},
        {"disable_nonlinear", field("disable_nonlinear", &ExperimentConfig::disable_nonlinear)},
        {"limit_symbols", field("limit_symbols", &ExperimentConfig::limit_symbols)},
        {"seed", field("seed", &ExperimentConfig::seed)},
        {"xi_min", field("xi_min", &ExperimentConfig::xi_min)},
        {"xi_max", field("xi_max", &ExperimentConfig::xi_max)},
        {"xi_samples", field("xi_samples", &ExperimentConfig::xi_samples)},
        {"sigma_list", field("sigma_list", &ExperimentConfig::sigma_list)},
        {"decay_epsilon_list", field("decay_epsilon_list", &ExperimentConfig::decay_epsilon_list)},
        {"t_lo", field("t_lo", &ExperimentConfig::t_lo)},
        {"t_hi", field("t_hi", &ExperimentConfig::t_hi)},
        {"decay_samples", field("decay_samples", &ExperimentConfig::decay_samples)},
        {"cutoff_hi", field("cutoff_hi", &ExperimentConfig::cutoff_hi)},
        {"output_dir", field("output_dir", &ExperimentConfig::output_dir)},
        {"threads", field("threads", &ExperimentConfig::threads)},
        {"snapshots", field("snapshots", &ExperimentConfig::snapshots)},
    };
    return f;
}

void require(bool ok, const std::string& msg)
{
    if (!ok) throw ConfigError(msg);
}

void require_decreasing(const std::vector<double>& v, double ceiling, const char* name)
{
    require(!v.empty(), std::string(name) + " must not be empty");
    for (std::size_t i = 0; i < v.size(); ++i) {
        require(v[i] > 0.0 && v[i] <= ceiling,
                std::string(name) + " entries must lie in (0, " + std::to_string(ceiling) + "]");
        if (i > 0) require(v[i] < v[i - 1], std::string(name) + " must be strictly decreasing");
    }
}

} // namespace

const std::vector<std::string>& experiment_kinds()
{
    static const std::vector<std::string> k = {"simulate", "converge", "darcy", "damped",
                                               "spectrum", "decay",    "selftest"};
    return k;
}

void ExperimentConfig::validate() const
{
    const auto& kinds = experiment_kinds();
    require(std::find(kinds.begin(), kinds.end(), kind) != kinds.end(), "unknown experiment kind '" + kind + "'");
    require(dim == 2, "simulations run in two dimensions");
    require(n >= 8 && (n & (n - 1)) == 0, "n must be a power of two >= 8");
    require(length > 0.0 && std::isfinite(length), "length must be positive");
    require(dt > 0.0 && t_end >= 0.0 && output_stride > 0.0, "dt, output_stride must be positive, t_end >= 0");
    require(cfl_safety > 0.0 && cfl_safety < 1.0, "cfl_safety must lie in (0, 1)");
    require(max_halvings >= 0, "max_halvings must be >= 0");
    require(layer_samples == 0 || (layer_samples >= 2 && layer_lo > 0.0 && layer_hi > layer_lo),
            "initial-layer sampling needs layer_samples >= 2 and 0 < layer_lo < layer_hi");
    require(epsilon_ceiling > 0.0 && epsilon_ceiling <= 1.0, "epsilon_ceiling must lie in (0, 1]");
    require_decreasing(epsilon_list, epsilon_ceiling, "epsilon_list");
    require_decreasing(decay_epsilon_list, 1.0, "decay_epsilon_list");
    require(mu > 0.0, "mu must be positive");
    require(sigma1 >= -0.5 * dim && sigma1 < 0.5 * dim - 1.0, "sigma1 must lie in [-d/2, d/2 - 1)");
    require(k_cutoff >= 1.0, "k_cutoff must be >= 1");
    require(target_energy > 0.0 && amplitude_factor > 0.0, "target_energy and amplitude_factor must be positive");
    require(data == "ill_prepared" || data == "prepared", "data must be 'ill_prepared' or 'prepared'");
    require(xi_min > 0.0 && xi_max > xi_min && xi_samples >= 2, "spectrum sweep needs 0 < xi_min < xi_max");
    require(!sigma_list.empty(), "sigma_list must not be empty");
    for (double s : sigma_list) require(s > sigma1, "every sigma must exceed sigma1");
    require(t_lo > 0.0 && t_hi >= 10.0 * t_lo, "decay window needs t_hi >= 10 t_lo");
    require(decay_samples >= 3, "decay_samples must be >= 3");
    require(cutoff_hi > 0.0, "cutoff_hi must be positive");
    require(threads >= 1, "threads must be >= 1");
    require(!output_dir.empty(), "output_dir must not be empty");
}

nlohmann::json to_json(const ExperimentConfig& cfg)
{
    json j = json::object();
    for (const auto& [key, f] : fields()) f.put(cfg, j);
    return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    ExperimentConfig cfg;
    for (const auto& [key, value] : j.items()) {
        const auto it = fields().find(key);
        if (it == fields().end()) throw ConfigError("unknown config key '" + key + "'");
        it->second.get(cfg, value);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

} // namespace relaxflow
