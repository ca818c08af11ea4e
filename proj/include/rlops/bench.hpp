#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rlops/config.hpp"
#include "rlops/envs.hpp"
#include "rlops/learners.hpp"

namespace rlops {

/// The operator x environment x seeds run matrix plus output settings.
struct ExperimentConfig {
    EnvName environment = EnvName::MountainCar;
    GridSpec grid;
    LearnerConfig learner;
    std::vector<BackupKind> operators;
    std::vector<std::uint64_t> seeds;
    int smoothing_window = 100;
    std::string output_dir = "out";
};

/// Reads sections [env], [learner], [experiment]. Throws ConfigError with
/// the offending key on invalid input.
ExperimentConfig parse_experiment_config(const ConfigFile& file);
ExperimentConfig load_experiment_config(const std::string& path);

/// FNV-1a over the canonical serialization; binds results to the exact
/// configuration.
std::uint64_t config_hash(const ExperimentConfig& config);

struct CellResult {
    BackupKind op = BackupKind::Classical;
    std::uint64_t seed = 0;
    std::vector<EpisodeLog> episodes;
    bool failed = false;
    std::string error;
};

struct RunResult {
    std::vector<CellResult> cells; // operator-major, seed-minor order
    std::uint64_t config_hash = 0;
    double wall_seconds = 0.0;
    int failed_cells = 0;
};

/// Runs every (operator, seed) cell, up to `threads` in parallel (0 means
/// BENCH_THREADS or hardware concurrency). Cell failures are recorded and
/// the remaining cells still run.
RunResult run_experiment(const ExperimentConfig& config, int threads = 0);

/// Writes one CSV per cell (`<operator>_seed<seed>.csv`, columns
/// episode,total_reward,steps) plus `aggregate.csv` (episode column and one
/// seed-averaged, window-smoothed reward column per operator) and
/// `run_manifest.txt`. Returns the aggregate CSV path.
std::string write_experiment_csvs(const ExperimentConfig& config, const RunResult& result);

/// Seed-mean of per-episode rewards followed by a trailing moving average.
std::vector<double> smooth_rewards(const std::vector<std::vector<double>>& per_seed_rewards,
                                   int window);

/// Self-contained SVG line chart from an aggregate CSV (first column x,
/// remaining columns one labeled series each). Throws on malformed or
/// empty input; nothing is written on error.
void emit_plot(const std::string& aggregate_csv_path, const std::string& output_svg_path);

/// Chart rendering on parsed data, used by emit_plot and the picard CLI.
std::string render_line_chart_svg(const std::vector<double>& x,
                                  const std::vector<std::vector<double>>& series,
                                  const std::vector<std::string>& labels,
                                  const std::string& x_label, const std::string& y_label);

} // namespace rlops
