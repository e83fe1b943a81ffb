#pragma once

#include "relaxflow/config.hpp"
#include "relaxflow/initial_data.hpp"
#include "relaxflow/record_io.hpp"
#include "relaxflow/time_integrator.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

namespace relaxflow {

/// Acceptance gates applied by the experiment drivers.
namespace gates {
inline constexpr double kConvergeSlopeMin = 0.9;
inline constexpr double kConvergeR2Min = 0.98;
inline constexpr double kDarcySlopeMin = 0.9;
inline constexpr double kDampedSlopeMin = 1.8;
inline constexpr double kHeatSlopeTol = 0.03;
inline constexpr double kUniformSlopeTol = 0.05;
inline constexpr double kRelativeVelocityGain = 0.5;
inline constexpr double kRelativeVelocityTol = 0.08;
inline constexpr double kDecayR2Min = 0.99;
inline constexpr double kCharPolyTol = 1e-10;
inline constexpr int kMinFitPoints = 3;
} // namespace gates

inline constexpr const char* kSoftwareVersion = "relaxflow 1.0.0";

/// Everything one experiment produces; write_record lays it out on disk.
struct ExperimentRecord {
    nlohmann::json config;
    std::vector<SeriesRow> series;
    nlohmann::json slopes = nlohmann::json::object();
    bool passed = true;
    bool partial = false;
    std::map<std::string, Snapshot> snapshots;
    /// Extra files (file name -> content), e.g. spectrum.csv.
    std::map<std::string, std::string> files;
};

/// One member of an epsilon sweep.
struct EpsilonRun {
    double epsilon = 0.0;
    int J = 0;
    double E0 = 0.0;
    double dE0 = 0.0;
    Trajectory<EnsState> trajectory;
    std::vector<Snapshot> snapshots;
};

struct SweepResult {
    InitialData data;
    std::vector<EpsilonRun> runs;
    int j_min = 0;
    int j_max = 0;
};

StepperConfig stepper_config(const ExperimentConfig& cfg, double epsilon);
InitialData make_initial_data(const Grid& grid, const ExperimentConfig& cfg);

/// Paired E-NS / KS-NS runs for every epsilon (parallel up to cfg.threads),
/// results in epsilon_list order.
SweepResult run_sweep(const ExperimentConfig& cfg);

ExperimentRecord run_simulate(const ExperimentConfig& cfg);
ExperimentRecord run_converge(const ExperimentConfig& cfg);
ExperimentRecord run_darcy(const ExperimentConfig& cfg);
ExperimentRecord run_damped_modes(const ExperimentConfig& cfg);
ExperimentRecord run_spectrum(const ExperimentConfig& cfg);
ExperimentRecord run_decay(const ExperimentConfig& cfg);
ExperimentRecord run_selftest(const ExperimentConfig& cfg);

/// Dispatch on cfg.kind.
ExperimentRecord run_experiment(const ExperimentConfig& cfg);

/// Creates dir and writes config.json, series.csv, slopes.json, snapshots and extra files.
void write_record(const ExperimentRecord& rec, const std::string& dir);

} // namespace relaxflow
