#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pmarl/harness/evaluate.hpp"
#include "pmarl/harness/metrics.hpp"
#include "pmarl/harness/run_config.hpp"

namespace pmarl::harness {

struct TrainResult {
  std::filesystem::path run_dir;
  int updates = 0;
  std::int64_t env_steps = 0;
  // Self-play: one pair. Against a background pool: one pair per background,
  // ego in the left seat.
  std::vector<std::array<MetricsRecord, sim::kNumAgents>> final_eval;
};

// Writes config.json, metrics.csv, checkpoints/ and final_eval.json under
// cfg.out. A zero-update budget writes only the config and initial checkpoints.
TrainResult cmd_train(const RunConfig& cfg);

// Header and per-update rows of metrics.csv.
const std::vector<std::string>& train_metrics_columns();

EvalResult cmd_eval(const std::string& left_checkpoint, const std::string& right_checkpoint, const RunConfig& cfg);

struct SweepCell {
  double alpha_left = 0.0;
  double alpha_right = 0.0;
  std::optional<std::array<MetricsRecord, sim::kNumAgents>> metrics;
  std::string error;  // set when the cell failed

  bool operator==(const SweepCell&) const = default;
};

struct SweepGrid {
  std::vector<double> alphas;
  std::vector<SweepCell> cells;  // row-major over (alpha_left, alpha_right)

  bool operator==(const SweepGrid&) const = default;
};

// One joint training run per personality pair under cfg.out/cells/, reusing a
// cell whose stored config matches. Writes sweep_grid.csv, sweep_success.csv,
// sweep_collision.csv and collision_curves.csv.
SweepGrid cmd_sweep(const RunConfig& cfg);

void write_sweep_grid(const SweepGrid& grid, const std::filesystem::path& path);
SweepGrid read_sweep_grid(const std::filesystem::path& path);

struct CrossEvalRow {
  std::string background;
  std::array<MetricsRecord, sim::kNumAgents> metrics;  // [ego, background]
};

// Ego in the left seat against each background checkpoint's policy in the
// right seat. Writes cross_eval.csv under cfg.out.
std::vector<CrossEvalRow> cmd_cross_eval(const std::string& ego_checkpoint,
                                         const std::vector<std::string>& backgrounds, const RunConfig& cfg);

// Reads run_dir/episodes.jsonl and writes trajectories/episode_<id>.csv and
// .jsonl. An empty id list exports every episode; an unknown id throws
// NotFoundError. Returns the exported episode ids.
std::vector<int> export_trajectories(const std::filesystem::path& run_dir, const std::vector<int>& ids,
                                     bool verbose_rewards);

}  // namespace pmarl::harness
