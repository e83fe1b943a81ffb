#include "relaxflow/experiments.hpp"

#include "relaxflow/decay_quadrature.hpp"
#include "relaxflow/errors.hpp"
#include "relaxflow/fit.hpp"
#include "relaxflow/linear_spectrum.hpp"
#include "relaxflow/selftest.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <thread>

namespace relaxflow {

namespace {

using json = nlohmann::json;

std::string run_id(double eps)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "eps_%.6g", eps);
    return buf;
}

json fit_json(const SlopeFit& f)
{
    return json{{"slope", f.slope},
                {"intercept", f.intercept},
                {"r2", f.r2},
                {"stderr", f.stderr_slope},
                {"points", f.points}};
}

// Fit log(value) against log(eps) over the completed runs; refuses < 3 points.
template <class Get>
json sweep_fit(const SweepResult& sw, Get get, std::optional<SlopeFit>& out)
{
    std::vector<double> x, y;
    for (const auto& r : sw.runs) {
        if (r.trajectory.failed || r.trajectory.diagnostics.empty()) continue;
        x.push_back(r.epsilon);
        y.push_back(get(r.trajectory.diagnostics.back()));
    }
    json j;
    j["epsilon"] = x;
    j["value"] = y;
    if (static_cast<int>(x.size()) < gates::kMinFitPoints) {
        j["fit"] = nullptr;
        j["refused"] = "fewer than " + std::to_string(gates::kMinFitPoints) + " completed runs";
        out.reset();
        return j;
    }
    out = fit_slope(x, y);
    j["fit"] = fit_json(*out);
    return j;
}

json truncation_note(const SweepResult& sw, const ExperimentConfig& cfg)
{
    json t;
    t["j_min"] = sw.j_min;
    t["j_max"] = sw.j_max;
    json J = json::object();
    for (double e : cfg.epsilon_list) J[run_id(e)] = ThresholdConfig{e, cfg.m0}.J();
    t["J_eps"] = J;
    t["m0"] = cfg.m0;
    return t;
}

void append_series(ExperimentRecord& rec, const SweepResult& sw)
{
    for (const auto& r : sw.runs) {
        const std::string id = run_id(r.epsilon);
        for (const auto& d : r.trajectory.diagnostics) {
            const std::pair<const char*, double> vals[] = {
                {"error_norm", d.error_norm},
                {"error_sup", d.error_sup},
                {"error_dissipation", d.error_dissipation},
                {"dt_error_integral", d.dt_error_integral},
                {"darcy_residual", d.darcy_residual_norm},
                {"darcy_integral", d.darcy_integral},
                {"Z_norm", d.Z_norm},
                {"R_norm", d.R_norm},
                {"Z_integral", d.Z_integral},
                {"R_integral", d.R_integral},
                {"E_eps", d.E_eps},
                {"D_eps", d.D_eps},
                {"D_eps_increment", d.D_eps_increment},
                {"Y_norm", d.Y_norm},
            };
            for (const auto& [name, v] : vals) rec.series.push_back({id, d.time, name, v});
        }
    }
}

ExperimentRecord sweep_record(const ExperimentConfig& cfg, const SweepResult& sw)
{
    ExperimentRecord rec;
    rec.config = to_json(cfg);
    append_series(rec, sw);
    rec.slopes["version"] = kSoftwareVersion;
    rec.slopes["truncation"] = truncation_note(sw, cfg);
    rec.slopes["time_derivative"] = "rhs";
    rec.slopes["amplitude"] = sw.data.amplitude;
    json runs = json::array();
    for (const auto& r : sw.runs) {
        json j{{"run_id", run_id(r.epsilon)},
               {"epsilon", r.epsilon},
               {"J_eps", r.J},
               {"E0", r.E0},
               {"dE0", r.dE0},
               {"accepted_steps", r.trajectory.accepted_steps},
               {"halvings", r.trajectory.halvings},
               {"failed", r.trajectory.failed}};
        if (r.trajectory.failed) {
            j["failure"] = r.trajectory.failure;
            rec.partial = true;
        }
        runs.push_back(j);
        if (cfg.snapshots)
            for (const auto& s : r.snapshots) {
                char name[96];
                std::snprintf(name, sizeof name, "snapshot_%s_t%.6g.bin", run_id(r.epsilon).c_str(), s.time);
                rec.snapshots[name] = s;
            }
    }
    rec.slopes["runs"] = runs;
    rec.slopes["partial"] = rec.partial;
    return rec;
}

// Gate helper: records the verdict under key and folds it into rec.passed.
void gate(ExperimentRecord& rec, const std::string& key, bool ok)
{
    rec.slopes["gates"][key] = ok;
    rec.passed = rec.passed && ok;
}

} // namespace

// ============================================================================
// Sweep
// ============================================================================

StepperConfig stepper_config(const ExperimentConfig& cfg, double epsilon)
{
    StepperConfig s;
    s.dt = cfg.dt;
    s.t_end = cfg.t_end;
    s.output_stride = cfg.output_stride;
    s.cfl_safety = cfg.cfl_safety;
    s.max_halvings = cfg.max_halvings;
    if (cfg.layer_samples > 0)
        s.extra_output_times = initial_layer_times(epsilon, cfg.layer_lo, cfg.layer_hi, cfg.layer_samples);
    return s;
}

InitialData make_initial_data(const Grid& grid, const ExperimentConfig& cfg)
{
    InitialDataConfig ic;
    ic.shape = {cfg.sigma1, cfg.k_cutoff};
    ic.seed = cfg.seed;
    ic.mu = cfg.mu;
    ic.target_energy = cfg.target_energy;
    ic.epsilon_ref = cfg.epsilon_list.front();
    ic.m0 = cfg.m0;
    InitialData d = generate_initial_data(grid, ic);
    if (cfg.amplitude_factor != 1.0) {
        d.limit.a *= cfg.amplitude_factor;
        d.limit.u *= cfg.amplitude_factor;
        d.w0 *= cfg.amplitude_factor;
        d.amplitude *= cfg.amplitude_factor;
        d.energy *= cfg.amplitude_factor;
    }
    return d;
}

SweepResult run_sweep(const ExperimentConfig& cfg)
{
    cfg.validate();
    const Grid grid(cfg.dim, cfg.n, cfg.length);
    SweepResult sw{make_initial_data(grid, cfg), {}, 0, 0};
    const DyadicDecomposition lp(grid);
    sw.j_min = lp.j_min();
    sw.j_max = lp.j_max();
    sw.runs.resize(cfg.epsilon_list.size());

    EnsOptions opt;
    opt.freeze_u = cfg.freeze_u;
    opt.disable_nonlinear = cfg.disable_nonlinear;
    opt.limit_symbols = cfg.limit_symbols;

    auto work = [&](std::size_t i) {
        const double eps = cfg.epsilon_list[i];
        EpsilonRun& run = sw.runs[i];
        run.epsilon = eps;
        const ThresholdConfig th{eps, cfg.m0};
        run.J = th.J();
        const EnsState e0 = cfg.data == "prepared" ? prepared(sw.data.limit, eps) : ill_prepared(sw.data, eps);
        run.E0 = initial_energy(lp, sw.data.limit);
        run.dE0 = initial_error_energy(lp, e0, sw.data.limit, th);
        const StepperConfig sc = stepper_config(cfg, eps);
        const double t_end = sc.output_times().back();
        PairHook hook;
        if (cfg.snapshots) {
            hook = [&](double t, const EnsState& s, const KsnsState&) {
                if (t == 0.0 || t == t_end) run.snapshots.push_back(make_snapshot({&s.a, &s.w, &s.u}, t));
            };
        }
        run.trajectory = integrate_pair(e0, sw.data.limit, sc, th, opt, hook, false);
    };

    const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), sw.runs.size());
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < sw.runs.size(); ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(nthreads);
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < nthreads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t i = next++; i < sw.runs.size(); i = next++) work(i);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    return sw;
}

// ============================================================================
// Drivers
// ============================================================================

ExperimentRecord run_simulate(const ExperimentConfig& cfg)
{
    ExperimentConfig one = cfg;
    one.epsilon_list = {cfg.epsilon_list.front()};
    const SweepResult sw = run_sweep(one);
    ExperimentRecord rec = sweep_record(one, sw);
    rec.config = to_json(cfg);
    gate(rec, "completed", !rec.partial);
    return rec;
}

ExperimentRecord run_converge(const ExperimentConfig& cfg)
{
    const SweepResult sw = run_sweep(cfg);
    ExperimentRecord rec = sweep_record(cfg, sw);
    std::optional<SlopeFit> sup, diss, dterr;
    rec.slopes["converge"] = sweep_fit(sw, [](const DiagnosticsSample& d) { return d.error_sup; }, sup);
    rec.slopes["converge_dissipation"] =
        sweep_fit(sw, [](const DiagnosticsSample& d) { return d.error_dissipation; }, diss);
    rec.slopes["converge_time_derivative"] =
        sweep_fit(sw, [](const DiagnosticsSample& d) { return d.dt_error_integral; }, dterr);
    rec.slopes["converge"]["gate"] = {{"min_slope", gates::kConvergeSlopeMin}, {"min_r2", gates::kConvergeR2Min}};
    gate(rec, "converge", sup && sup->slope >= gates::kConvergeSlopeMin && sup->r2 >= gates::kConvergeR2Min);
    return rec;
}

ExperimentRecord run_darcy(const ExperimentConfig& cfg)
{
    const SweepResult sw = run_sweep(cfg);
    ExperimentRecord rec = sweep_record(cfg, sw);
    std::optional<SlopeFit> f;
    rec.slopes["darcy"] = sweep_fit(sw, [](const DiagnosticsSample& d) { return d.darcy_integral; }, f);
    rec.slopes["darcy"]["gate"] = {{"min_slope", gates::kDarcySlopeMin}};
    gate(rec, "darcy", f && f->slope >= gates::kDarcySlopeMin);
    return rec;
}

ExperimentRecord run_damped_modes(const ExperimentConfig& cfg)
{
    const SweepResult sw = run_sweep(cfg);
    ExperimentRecord rec = sweep_record(cfg, sw);
    std::optional<SlopeFit> z, r;
    rec.slopes["damped_Z"] = sweep_fit(sw, [](const DiagnosticsSample& d) { return d.Z_integral; }, z);
    rec.slopes["damped_R"] = sweep_fit(sw, [](const DiagnosticsSample& d) { return d.R_integral; }, r);
    rec.slopes["damped_Z"]["gate"] = {{"min_slope", gates::kDampedSlopeMin}};
    rec.slopes["damped_R"]["gate"] = {{"min_slope", gates::kDampedSlopeMin}};
    gate(rec, "damped_Z", z && z->slope >= gates::kDampedSlopeMin);
    gate(rec, "damped_R", r && r->slope >= gates::kDampedSlopeMin);
    return rec;
}

ExperimentRecord run_spectrum(const ExperimentConfig& cfg)
{
    cfg.validate();
    ExperimentRecord rec;
    rec.config = to_json(cfg);
    std::ostringstream csv;
    csv.precision(17);
    csv << "epsilon,xi,re_l1,im_l1,re_l2,im_l2,re_l3,im_l3,re_l4,im_l4,regime_tag\n";
    double worst = 0.0;
    for (double eps : cfg.epsilon_list) {
        for (int i = 0; i < cfg.xi_samples; ++i) {
            const double xi = cfg.xi_min * std::pow(cfg.xi_max / cfg.xi_min, double(i) / (cfg.xi_samples - 1));
            const SymbolPoint p{xi, eps, cfg.mu, cfg.dim};
            const SymbolEigenSet s = eigenvalues(p);
            for (Complex l : {s.lambda1, s.lambda2}) worst = std::max(worst, char_poly_residual(p, Block::B1, l));
            for (Complex l : {s.lambda3, s.lambda4}) worst = std::max(worst, char_poly_residual(p, Block::B2, l));
            const char* tag = eps * xi <= 0.25 ? "low" : (eps * xi >= 4.0 ? "high" : "mid");
            csv << eps << ',' << xi;
            for (Complex l : {s.lambda1, s.lambda2, s.lambda3, s.lambda4}) csv << ',' << l.real() << ',' << l.imag();
            csv << ',' << tag << '\n';
        }
    }
    rec.files["spectrum.csv"] = csv.str();
    rec.slopes["version"] = kSoftwareVersion;
    rec.slopes["max_char_poly_residual"] = worst;
    gate(rec, "char_poly_residual", worst <= gates::kCharPolyTol);
    return rec;
}

ExperimentRecord run_decay(const ExperimentConfig& cfg)
{
    cfg.validate();
    ExperimentRecord rec;
    rec.config = to_json(cfg);
    rec.slopes["version"] = kSoftwareVersion;
    RadialProfile prof;
    prof.sigma1 = cfg.sigma1;
    prof.d = cfg.dim;
    prof.cutoff_hi = cfg.cutoff_hi;

    std::ostringstream csv;
    csv.precision(17);
    csv << "symbol,component,epsilon,sigma1,sigma,t,norm\n";
    json fits = json::array();
    auto run_fit = [&](const DecayQuery& q) {
        const DecayFit f = fit_decay(prof, q, cfg.t_lo, cfg.t_hi, cfg.decay_samples);
        for (std::size_t i = 0; i < f.times.size(); ++i)
            csv << to_string(q.symbol) << ',' << to_string(q.component) << ','
                << (q.symbol == SymbolKind::Heat ? 0.0 : q.epsilon) << ',' << prof.sigma1 << ',' << q.sigma << ','
                << f.times[i] << ',' << f.norms[i] << '\n';
        fits.push_back({{"symbol", to_string(q.symbol)},
                        {"component", to_string(q.component)},
                        {"epsilon", q.symbol == SymbolKind::Heat ? 0.0 : q.epsilon},
                        {"sigma", q.sigma},
                        {"slope", f.slope},
                        {"r2", f.r2},
                        {"stderr", f.stderr_slope}});
        return f;
    };

    bool heat_ok = true, uniform_ok = true, gain_ok = true, r2_ok = true;
    bool gain_checked = false;
    for (double sigma : cfg.sigma_list) {
        DecayQuery hq;
        hq.sigma = sigma;
        hq.mu = cfg.mu;
        const DecayFit heat = run_fit(hq);
        const double target = -(sigma - cfg.sigma1) / 2.0;
        heat_ok = heat_ok && std::abs(heat.slope - target) <= gates::kHeatSlopeTol;
        r2_ok = r2_ok && heat.r2 >= gates::kDecayR2Min;
        for (double eps : cfg.decay_epsilon_list) {
            DecayQuery q = hq;
            q.epsilon = eps;
            q.symbol = SymbolKind::B1;
            q.component = Component::Density;
            const DecayFit dens = run_fit(q);
            q.component = Component::CompressibleVelocity;
            run_fit(q);
            q.symbol = SymbolKind::B2;
            q.component = Component::U;
            const DecayFit u = run_fit(q);
            q.component = Component::Pw;
            run_fit(q);
            q.component = Component::R;
            const DecayFit r = run_fit(q);
            uniform_ok = uniform_ok && std::abs(dens.slope - heat.slope) <= gates::kUniformSlopeTol &&
                         std::abs(u.slope - heat.slope) <= gates::kUniformSlopeTol;
            r2_ok = r2_ok && dens.r2 >= gates::kDecayR2Min && u.r2 >= gates::kDecayR2Min;
            if (sigma == 0.0) {
                gain_checked = true;
                const double gain = u.slope - r.slope;
                rec.slopes["relative_velocity_gain"][run_id(eps)] = gain;
                gain_ok = gain_ok && std::abs(gain - gates::kRelativeVelocityGain) <= gates::kRelativeVelocityTol;
            }
        }
    }
    rec.files["decay.csv"] = csv.str();
    rec.slopes["fits"] = fits;
    gate(rec, "heat_rates", heat_ok);
    gate(rec, "eps_uniform_rates", uniform_ok);
    gate(rec, "fit_quality", r2_ok);
    if (gain_checked) gate(rec, "relative_velocity_gain", gain_ok);
    return rec;
}

ExperimentRecord run_selftest(const ExperimentConfig& cfg)
{
    cfg.validate();
    ExperimentRecord rec;
    rec.config = to_json(cfg);
    rec.slopes["version"] = kSoftwareVersion;
    json checks = json::array();
    for (const auto& c : run_selftest_suite(cfg.seed)) {
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"tolerance", c.tolerance}});
        rec.passed = rec.passed && c.passed;
    }
    rec.slopes["checks"] = checks;
    return rec;
}

ExperimentRecord run_experiment(const ExperimentConfig& cfg)
{
    cfg.validate();
    if (cfg.kind == "simulate") return run_simulate(cfg);
    if (cfg.kind == "converge") return run_converge(cfg);
    if (cfg.kind == "darcy") return run_darcy(cfg);
    if (cfg.kind == "damped") return run_damped_modes(cfg);
    if (cfg.kind == "spectrum") return run_spectrum(cfg);
    if (cfg.kind == "decay") return run_decay(cfg);
    if (cfg.kind == "selftest") return run_selftest(cfg);
    throw ConfigError("unknown experiment kind '" + cfg.kind + "'");
}

void write_record(const ExperimentRecord& rec, const std::string& dir)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
    const fs::path root(dir);
    write_json((root / "config.json").string(), rec.config);
    write_series_csv((root / "series.csv").string(), rec.series);
    json slopes = rec.slopes;
    slopes["passed"] = rec.passed;
    write_json((root / "slopes.json").string(), slopes);
    for (const auto& [name, snap] : rec.snapshots) write_snapshot((root / name).string(), snap);
    for (const auto& [name, text] : rec.files) write_text((root / name).string(), text);
}

} // namespace relaxflow
