#include "relaxflow/config.hpp"
#include "relaxflow/errors.hpp"
#include "relaxflow/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

namespace {

constexpr int kExitPass = 0;
constexpr int kExitGateFailed = 1;
constexpr int kExitError = 2;

struct Options {
    std::string config;
    std::string out;
    long long seed = -1;
    int threads = 0;
};

void add_common(CLI::App* sub, Options& o)
{
    sub->add_option("--config", o.config, "JSON experiment configuration");
    sub->add_option("--out", o.out, "output directory (overrides config)");
    sub->add_option("--seed", o.seed, "RNG seed (overrides config)")->check(CLI::NonNegativeNumber);
    sub->add_option("--threads", o.threads, "worker threads (overrides config)")->check(CLI::PositiveNumber);
}

int run(const std::string& kind, const Options& o)
{
    using namespace relaxflow;
    ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
    cfg.kind = kind;
    if (!o.out.empty()) cfg.output_dir = o.out;
    if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
    if (o.threads > 0) cfg.threads = o.threads;
    cfg.validate();

    const ExperimentRecord rec = run_experiment(cfg);
    write_record(rec, cfg.output_dir);
    if (rec.slopes.contains("gates"))
        for (const auto& [name, ok] : rec.slopes["gates"].items())
            std::printf("%-28s %s\n", name.c_str(), ok.get<bool>() ? "pass" : "FAIL");
    if (rec.partial) std::printf("partial: some runs did not complete (see slopes.json)\n");
    std::printf("%s -> %s\n", kind.c_str(), cfg.output_dir.c_str());
    return rec.passed ? kExitPass : kExitGateFailed;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Relaxation-limit simulator and verification harness"};
    app.set_version_flag("--version", relaxflow::kSoftwareVersion);
    app.require_subcommand(1);

    Options opts;
    const std::pair<const char*, const char*> kinds[] = {
        {"simulate", "single E-NS / KS-NS run with snapshots"},
        {"converge", "epsilon sweep of the limit error"},
        {"darcy", "epsilon sweep of the Darcy residual"},
        {"damped", "epsilon sweep of the damped modes Z and R"},
        {"spectrum", "eigenvalue sweep of the linear symbols"},
        {"decay", "semigroup decay rates by radial quadrature"},
        {"selftest", "invariant checks and negative controls"},
    };
    for (const auto& [name, help] : kinds) add_common(app.add_subcommand(name, help), opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitPass : kExitError;
    }
    try {
        return run(app.get_subcommands().front()->get_name(), opts);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitError;
    }
}
