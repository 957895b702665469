#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <nlohmann/json.hpp>

#include "pmarl/errors.hpp"
#include "pmarl/harness/commands.hpp"
#include "pmarl/marl/learner.hpp"

using namespace pmarl;
using namespace pmarl::harness;
namespace fs = std::filesystem;
using sim::AgentStatus;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pmarl_harness_" + name);
  fs::remove_all(p);
  return p;
}

RunConfig tiny_config(const fs::path& out) {
  RunConfig c;
  c.train.rollout_steps = 256;
  c.train.minibatch = 64;
  c.train.epochs = 2;
  c.train.hidden_sizes = {16, 16};
  c.train.total_steps = 512;
  c.train.seed = 11;
  c.eval.episodes = 4;
  c.out = out.string();
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

// Independent recount of one agent's record from raw statuses.
void expect_audited(const MetricsRecord& m, const std::vector<AgentStatus>& statuses, double seconds) {
  int s = 0, c = 0, o = 0, t = 0;
  for (auto st : statuses) {
    s += st == AgentStatus::ReachGoal;
    c += st == AgentStatus::Collision;
    o += st == AgentStatus::OffRoad;
    t += st == AgentStatus::Timeout;
  }
  const double n = static_cast<double>(statuses.size());
  ASSERT_EQ(m.episodes, static_cast<int>(statuses.size()));
  EXPECT_NEAR(m.success_rate, s / n, 1e-12);
  EXPECT_NEAR(m.collision_rate, c / n, 1e-12);
  EXPECT_NEAR(m.offroad_rate, o / n, 1e-12);
  EXPECT_NEAR(m.timeout_rate, t / n, 1e-12);
  EXPECT_NEAR(m.success_rate + m.collision_rate + m.offroad_rate + m.timeout_rate, 1.0, 1e-12);
  EXPECT_NEAR(m.safety, 1.0 - c / n, 1e-12);
  EXPECT_NEAR(m.efficiency, std::max(0.0, (s - c - o) / seconds), 1e-12);
}

void expect_sums_to_one(const MetricsRecord& m) {
  EXPECT_NEAR(m.success_rate + m.collision_rate + m.offroad_rate + m.timeout_rate, 1.0, 1e-12);
}

// Mean action is (steer 0, accel -1) everywhere: the car never leaves its spawn.
tensor::GaussianPolicyHead parked_policy() {
  std::mt19937_64 rng(3);
  const std::vector<std::size_t> hidden{8};
  auto head = tensor::GaussianPolicyHead::init(sim::kObsDim, hidden, -0.5, rng);
  auto& last_w = head.mean_net.weights.back();
  std::fill(last_w.data.begin(), last_w.data.end(), 0.0);
  head.mean_net.biases.back() = {0.0, -1.0};
  return head;
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(PMARL_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(Metrics, EfficiencyWorkedExample) {
  std::vector<AgentStatus> st(7, AgentStatus::ReachGoal);
  st.insert(st.end(), 3, AgentStatus::Collision);
  const auto m = compute_metrics(st, 500.0);
  EXPECT_DOUBLE_EQ(m.efficiency, 0.008);
  EXPECT_DOUBLE_EQ(m.success_rate, 0.7);
  EXPECT_DOUBLE_EQ(m.collision_rate, 0.3);
  EXPECT_DOUBLE_EQ(m.safety, 0.7);
  EXPECT_EQ(m.timeout_rate, 0.0);
  EXPECT_DOUBLE_EQ(m.mean_episode_seconds, 50.0);
  expect_audited(m, st, 500.0);
}

TEST(Metrics, ZeroCollisionsGivesFullSafety) {
  const std::vector<AgentStatus> st{AgentStatus::ReachGoal, AgentStatus::Timeout, AgentStatus::OffRoad};
  const auto m = compute_metrics(st, 90.0);
  EXPECT_EQ(m.safety, 1.0);
  expect_audited(m, st, 90.0);
}

TEST(Metrics, EfficiencyIsClampedAtZero) {
  const std::vector<AgentStatus> st{AgentStatus::ReachGoal, AgentStatus::OffRoad, AgentStatus::Collision};
  EXPECT_EQ(compute_metrics(st, 30.0).efficiency, 0.0);
}

TEST(Metrics, TimeoutsCountTowardNeitherSide) {
  const std::vector<AgentStatus> st{AgentStatus::ReachGoal, AgentStatus::Timeout, AgentStatus::Timeout};
  EXPECT_DOUBLE_EQ(compute_metrics(st, 100.0).efficiency, 0.01);
}

TEST(Metrics, StatusesPartitionRandomEpisodeSets) {
  std::mt19937_64 rng(5);
  const std::array<AgentStatus, 4> kinds{AgentStatus::ReachGoal, AgentStatus::Collision, AgentStatus::OffRoad,
                                         AgentStatus::Timeout};
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<AgentStatus> st(1 + rng() % 97);
    for (auto& s : st) s = kinds[rng() % 4];
    const double seconds = 1.0 + static_cast<double>(rng() % 10000) / 7.0;
    expect_audited(compute_metrics(st, seconds), st, seconds);
  }
}

TEST(Metrics, RunningStatusIsRejected) {
  const std::vector<AgentStatus> st{AgentStatus::ReachGoal, AgentStatus::Running};
  EXPECT_THROW(compute_metrics(st, 10.0), ContractViolation);
}

TEST(Metrics, ValuesAndJsonRoundTrip) {
  std::vector<AgentStatus> st{AgentStatus::ReachGoal, AgentStatus::Collision, AgentStatus::Timeout};
  const auto m = compute_metrics(st, 37.3);
  EXPECT_EQ(metrics_from_values(metrics_values(m)), m);
  EXPECT_EQ(metrics_values(m).size(), metrics_columns().size());
  nlohmann::json j = m;
  EXPECT_EQ(j.get<MetricsRecord>(), m);
}

TEST(Eval, NeverMovingPolicyTimesOut) {
  const auto parked = parked_policy();
  marl::EnvironmentSpec env;
  const auto personalities = marl::TrainConfig{}.personalities;
  const auto r = evaluate(parked, parked, env, personalities, {3, 1, false});
  for (const auto& m : r.metrics) {
    EXPECT_EQ(m.timeout_rate, 1.0);
    EXPECT_EQ(m.efficiency, 0.0);
    EXPECT_EQ(m.safety, 1.0);
    EXPECT_NEAR(m.mean_episode_seconds, env.scenario.max_steps * env.scenario.dt, 1e-9);
  }
}

TEST(Eval, MetricsMatchRecordedEpisodes) {
  const fs::path dir = fresh_dir("eval_audit");
  auto cfg = tiny_config(dir);
  cmd_train(cfg);
  cfg.eval.record = true;
  cfg.eval.episodes = 6;
  cfg.out = (dir / "eval").string();
  const auto r = cmd_eval((dir / "checkpoints/left_final.json").string(),
                          (dir / "checkpoints/right_final.json").string(), cfg);
  ASSERT_EQ(r.episodes.size(), 6u);
  double seconds = 0.0;
  std::array<std::vector<AgentStatus>, 2> st;
  for (const auto& e : r.episodes) {
    seconds += e.length * cfg.env.scenario.dt;
    for (int a = 0; a < 2; ++a) st[a].push_back(e.status[a]);
  }
  for (int a = 0; a < 2; ++a) expect_audited(r.metrics[a], st[a], seconds);
  EXPECT_TRUE(fs::exists(dir / "eval/eval.json"));
  EXPECT_TRUE(fs::exists(dir / "eval/config.json"));
}

TEST(Eval, SameSeedSeesSameScenarios) {
  const auto parked = parked_policy();
  marl::EnvironmentSpec env;
  env.level = 3;
  const auto p = marl::TrainConfig{}.personalities;
  const auto a = evaluate(parked, parked, env, p, {4, 9, true});
  const auto b = evaluate(parked, parked, env, p, {4, 9, true});
  ASSERT_EQ(a.episodes.size(), b.episodes.size());
  for (std::size_t i = 0; i < a.episodes.size(); ++i) {
    EXPECT_EQ(a.episodes[i].scenario_seed, b.episodes[i].scenario_seed);
  }
}

TEST(Eval, BadCheckpointsRaiseLoadErrors) {
  const fs::path dir = fresh_dir("bad_ckpt");
  fs::create_directories(dir);
  std::ofstream(dir / "junk.json") << "{\"format\": \"something else\"}";
  auto cfg = tiny_config(dir / "out");
  EXPECT_THROW(cmd_eval((dir / "missing.json").string(), (dir / "missing.json").string(), cfg), NotFoundError);
  EXPECT_THROW(cmd_eval((dir / "junk.json").string(), (dir / "junk.json").string(), cfg), LoadError);
}

TEST(RunConfigIo, JsonRoundTrip) {
  RunConfig c = tiny_config("somewhere/else");
  c.env.level = 4;
  c.train.variant = marl::Variant::MAPPO;
  c.train.personalities = {reward::PersonalityParams::from_alpha(0.4), reward::PersonalityParams::from_alpha(0.1)};
  c.eval.seed = 123456789012345ull;
  c.sweep_alphas = {0.0, 1.0 / 3.0};
  c.background_checkpoints = {"a.json", "b.json"};
  const fs::path dir = fresh_dir("config_io");
  fs::create_directories(dir);
  save_run_config(c, (dir / "c.json").string());
  const RunConfig back = load_run_config((dir / "c.json").string());
  EXPECT_EQ(nlohmann::json(back), nlohmann::json(c));
  EXPECT_EQ(back.sweep_alphas, c.sweep_alphas);
  EXPECT_EQ(back.eval, c.eval);
  EXPECT_EQ(back.env.level, 4);
}

TEST(RunConfigIo, ValidationNamesTheField) {
  auto expect_field = [](RunConfig c, const std::string& field) {
    try {
      c.validate();
      ADD_FAILURE() << "expected ConfigError for " << field;
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
    }
  };
  RunConfig c;
  c.train.lr = -1.0;
  expect_field(c, "lr");
  c = {};
  c.eval.episodes = 0;
  expect_field(c, "episodes");
  c = {};
  c.env.level = 7;
  expect_field(c, "level");
  c = {};
  c.sweep_alphas.clear();
  expect_field(c, "alphas");
}

TEST(RunConfigIo, MissingAndMalformedFiles) {
  const fs::path dir = fresh_dir("config_bad");
  fs::create_directories(dir);
  EXPECT_THROW(load_run_config((dir / "none.json").string()), NotFoundError);
  std::ofstream(dir / "broken.json") << "{ not json";
  EXPECT_THROW(load_run_config((dir / "broken.json").string()), ConfigError);
}

TEST(Train, ZeroBudgetWritesConfigAndInitialCheckpointsOnly) {
  const fs::path dir = fresh_dir("zero_budget");
  auto cfg = tiny_config(dir);
  cfg.train.total_steps = 0;
  const auto r = cmd_train(cfg);
  EXPECT_EQ(r.updates, 0);
  EXPECT_TRUE(r.final_eval.empty());
  std::vector<std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), dir).string());
  }
  std::sort(files.begin(), files.end());
  EXPECT_EQ(files, (std::vector<std::string>{"checkpoints/left_initial.json", "checkpoints/right_initial.json",
                                             "config.json"}));
}

TEST(Train, SameSeedGivesIdenticalArtifacts) {
  const fs::path a = fresh_dir("same_seed_a"), b = fresh_dir("same_seed_b");
  cmd_train(tiny_config(a));
  cmd_train(tiny_config(b));
  for (const char* f : {"metrics.csv", "final_eval.json", "checkpoints/left_final.json",
                        "checkpoints/right_final.json", "checkpoints/left_initial.json"}) {
    ASSERT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  const auto rows = lines(a / "metrics.csv");
  ASSERT_EQ(rows.size(), 3u);  // header plus two updates
  std::string header;
  for (const auto& col : train_metrics_columns()) header += (header.empty() ? "" : ",") + col;
  EXPECT_EQ(rows[0], header);
}

TEST(Train, ConfigEchoReproducesTheRun) {
  const fs::path a = fresh_dir("echo_a"), b = fresh_dir("echo_b");
  auto cfg = tiny_config(a);
  cfg.env.level = 2;
  cfg.train.variant = marl::Variant::IPPO;
  cmd_train(cfg);
  auto echo = load_run_config((a / "config.json").string());
  echo.out = b.string();
  cmd_train(echo);
  EXPECT_EQ(slurp(a / "metrics.csv"), slurp(b / "metrics.csv"));
  EXPECT_EQ(slurp(a / "checkpoints/left_final.json"), slurp(b / "checkpoints/left_final.json"));
}

TEST(Train, DifferentSeedsDiverge) {
  const fs::path a = fresh_dir("seed_a"), b = fresh_dir("seed_b");
  auto cfg = tiny_config(a);
  cmd_train(cfg);
  cfg.out = b.string();
  cfg.train.seed = 12;
  cmd_train(cfg);
  EXPECT_NE(slurp(a / "metrics.csv"), slurp(b / "metrics.csv"));
}

TEST(Train, PeriodicCheckpointsAndFinalEvaluation) {
  const fs::path dir = fresh_dir("periodic");
  auto cfg = tiny_config(dir);
  cfg.train.total_steps = 768;
  cfg.train.checkpoint_every = 1;
  const auto r = cmd_train(cfg);
  EXPECT_EQ(r.updates, 3);
  EXPECT_TRUE(fs::exists(dir / "checkpoints/left_update_1.json"));
  EXPECT_TRUE(fs::exists(dir / "checkpoints/right_update_2.json"));
  EXPECT_FALSE(fs::exists(dir / "checkpoints/left_update_3.json"));
  ASSERT_EQ(r.final_eval.size(), 1u);
  for (const auto& m : r.final_eval[0]) {
    EXPECT_EQ(m.episodes, cfg.eval.episodes);
    expect_sums_to_one(m);
  }
  const auto j = nlohmann::json::parse(slurp(dir / "final_eval.json"));
  EXPECT_EQ(j.at("pairs").at(0).at("left").get<MetricsRecord>(), r.final_eval[0][0]);
}

TEST(Train, BackgroundPoolTrainsOnlyTheEgo) {
  const fs::path src = fresh_dir("bg_src"), dir = fresh_dir("bg_ego");
  cmd_train(tiny_config(src));
  auto cfg = tiny_config(dir);
  const std::string bg = (src / "checkpoints/right_final.json").string();
  cfg.background_checkpoints = {bg, (src / "checkpoints/right_initial.json").string()};
  const auto r = cmd_train(cfg);
  ASSERT_EQ(r.final_eval.size(), 2u);
  EXPECT_TRUE(fs::exists(dir / "checkpoints/left_final.json"));
  EXPECT_FALSE(fs::exists(dir / "checkpoints/right_final.json"));
}

TEST(Sweep, SingletonGrid) {
  const fs::path dir = fresh_dir("sweep_one");
  auto cfg = tiny_config(dir);
  cfg.sweep_alphas = {1.0};
  const auto grid = cmd_sweep(cfg);
  ASSERT_EQ(grid.cells.size(), 1u);
  EXPECT_EQ(grid.cells[0].alpha_left, 1.0);
  EXPECT_EQ(grid.cells[0].alpha_right, 1.0);
  ASSERT_TRUE(grid.cells[0].metrics.has_value()) << grid.cells[0].error;
  EXPECT_EQ(read_sweep_grid(dir / "sweep_grid.csv"), grid);
  for (const char* f : {"sweep_success.csv", "sweep_collision.csv", "collision_curves.csv"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
}

TEST(Sweep, GridIsCompleteAndCellsAreCached) {
  const fs::path dir = fresh_dir("sweep_two");
  auto cfg = tiny_config(dir);
  cfg.sweep_alphas = {0.0, 0.5};
  const auto grid = cmd_sweep(cfg);
  ASSERT_EQ(grid.cells.size(), 4u);
  for (const auto& cell : grid.cells) {
    ASSERT_TRUE(cell.metrics.has_value()) << cell.error;
    for (const auto& m : *cell.metrics) expect_sums_to_one(m);
  }
  EXPECT_EQ(grid.cells[1].alpha_left, 0.0);
  EXPECT_EQ(grid.cells[1].alpha_right, 0.5);

  // A second sweep reuses every cell: the cached checkpoints stay untouched.
  const auto stamp = fs::last_write_time(dir / "cells/l0_r0.5/checkpoints/left_final.json");
  EXPECT_EQ(cmd_sweep(cfg), grid);
  EXPECT_EQ(fs::last_write_time(dir / "cells/l0_r0.5/checkpoints/left_final.json"), stamp);

  // Long-format matrices carry one row per cell with both seats.
  const auto rows = lines(dir / "sweep_success.csv");
  EXPECT_EQ(rows.size(), 1u + 4u);
  EXPECT_EQ(rows[0], "alpha_left,alpha_right,success_left,success_right");
}

TEST(Sweep, FailedCellIsMarkedAndSweepContinues) {
  const fs::path dir = fresh_dir("sweep_fail");
  fs::create_directories(dir / "cells");
  std::ofstream(dir / "cells/l0_r1") << "a file where the cell directory should be";
  auto cfg = tiny_config(dir);
  cfg.sweep_alphas = {0.0, 1.0};
  const auto grid = cmd_sweep(cfg);
  ASSERT_EQ(grid.cells.size(), 4u);
  int failed = 0;
  for (const auto& cell : grid.cells) {
    if (cell.alpha_left == 0.0 && cell.alpha_right == 1.0) {
      EXPECT_FALSE(cell.metrics.has_value());
      EXPECT_FALSE(cell.error.empty());
      ++failed;
    } else {
      EXPECT_TRUE(cell.metrics.has_value()) << cell.error;
    }
  }
  EXPECT_EQ(failed, 1);
  EXPECT_EQ(read_sweep_grid(dir / "sweep_grid.csv"), grid);
  bool marker = false;
  for (const auto& l : lines(dir / "sweep_grid.csv")) marker |= l.find(",failed,") != std::string::npos;
  EXPECT_TRUE(marker);
}

TEST(Sweep, GridCsvRoundTripIsExact) {
  SweepGrid g;
  g.alphas = {0.1, 1.0 / 3.0};
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double al : g.alphas) {
    for (double ar : g.alphas) {
      SweepCell c{al, ar, std::nullopt, {}};
      if (al == ar && al > 0.2) {
        c.error = "diverged; loss is nan";
      } else {
        std::array<MetricsRecord, 2> m;
        for (auto& r : m) {
          r.episodes = 17;
          r.success_rate = u(rng);
          r.collision_rate = u(rng);
          r.offroad_rate = u(rng);
          r.timeout_rate = u(rng);
          r.safety = u(rng);
          r.efficiency = u(rng) * 1e-3;
          r.mean_episode_seconds = u(rng) * 60;
        }
        c.metrics = m;
      }
      g.cells.push_back(c);
    }
  }
  const fs::path dir = fresh_dir("grid_csv");
  fs::create_directories(dir);
  write_sweep_grid(g, dir / "grid.csv");
  EXPECT_EQ(read_sweep_grid(dir / "grid.csv"), g);
}

TEST(Sweep, MalformedGridFileIsALoadError) {
  const fs::path dir = fresh_dir("grid_bad");
  fs::create_directories(dir);
  std::ofstream(dir / "grid.csv") << "alpha_left,alpha_right\nfoo,bar\n";
  EXPECT_THROW(read_sweep_grid(dir / "grid.csv"), LoadError);
  EXPECT_THROW(read_sweep_grid(dir / "absent.csv"), NotFoundError);
}

TEST(CrossEval, SelfPlayRowMatchesEval) {
  const fs::path dir = fresh_dir("cross_self");
  auto cfg = tiny_config(dir);
  cmd_train(cfg);
  const std::string ego = (dir / "checkpoints/left_final.json").string();
  cfg.out = (dir / "cross").string();
  const auto rows = cmd_cross_eval(ego, {ego}, cfg);
  cfg.out = (dir / "eval").string();
  const auto pair = cmd_eval(ego, ego, cfg);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].metrics, pair.metrics);
}

TEST(CrossEval, OneRowPerBackground) {
  const fs::path dir = fresh_dir("cross_rows");
  auto cfg = tiny_config(dir);
  cmd_train(cfg);
  const std::string ego = (dir / "checkpoints/left_final.json").string();
  std::vector<std::string> bgs;
  for (const char* f : {"left_initial", "right_initial", "left_final", "right_final"}) {
    bgs.push_back((dir / "checkpoints" / (std::string(f) + ".json")).string());
  }
  cfg.out = (dir / "cross").string();
  const auto rows = cmd_cross_eval(ego, bgs, cfg);
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].background, bgs[i]);
    for (const auto& m : rows[i].metrics) expect_sums_to_one(m);
  }
  EXPECT_EQ(lines(dir / "cross/cross_eval.csv").size(), 5u);
  EXPECT_THROW(cmd_cross_eval(ego, {}, cfg), ConfigError);
}

TEST(Export, AllEpisodesReplayExactly) {
  const fs::path dir = fresh_dir("export");
  auto cfg = tiny_config(dir);
  cfg.eval.record = true;
  cfg.eval.episodes = 5;
  cmd_train(cfg);
  const auto recorded = load_episodes((dir / "episodes.jsonl").string());
  ASSERT_EQ(recorded.size(), 5u);

  const auto ids = export_trajectories(dir, {}, false);
  EXPECT_EQ(ids, (std::vector<int>{0, 1, 2, 3, 4}));
  for (const auto& rec : recorded) {
    const fs::path stem = dir / "trajectories" / ("episode_" + std::to_string(rec.id));
    // Rebuild the episode purely from the exported file and re-simulate it.
    EpisodeRecord from_file = rec;
    from_file.steps.clear();
    std::array<int, 2> per_agent{};
    for (const auto& l : lines(stem.string() + ".jsonl")) {
      const auto j = nlohmann::json::parse(l);
      EXPECT_EQ(j.at("scenario_seed").get<std::uint64_t>(), rec.scenario_seed);
      from_file.steps.push_back(j.get<StepRecord>());
      ++per_agent[from_file.steps.back().agent];
    }
    EXPECT_EQ(per_agent, rec.agent_length);
    EXPECT_EQ(lines(stem.string() + ".csv").size(), 1u + rec.agent_length[0] + rec.agent_length[1]);

    const auto replay = replay_episode(from_file, cfg.env);
    ASSERT_EQ(replay.size(), from_file.steps.size());
    for (std::size_t k = 0; k < replay.size(); ++k) {
      const auto& a = replay[k].state;
      const auto& b = from_file.steps[k].state;
      EXPECT_NEAR(a.x, b.x, 1e-12);
      EXPECT_NEAR(a.y, b.y, 1e-12);
      EXPECT_NEAR(a.heading, b.heading, 1e-12);
      EXPECT_NEAR(a.speed, b.speed, 1e-12);
      EXPECT_EQ(replay[k].status, from_file.steps[k].status);
    }
  }
}

TEST(Export, VerboseRewardsAndUnknownIds) {
  const fs::path dir = fresh_dir("export_verbose");
  auto cfg = tiny_config(dir);
  cfg.eval.record = true;
  cfg.eval.episodes = 2;
  cmd_train(cfg);
  EXPECT_EQ(export_trajectories(dir, {1}, true), (std::vector<int>{1}));
  const auto csv = lines(dir / "trajectories/episode_1.csv");
  ASSERT_FALSE(csv.empty());
  EXPECT_NE(csv[0].find("r_self_stream"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "trajectories/episode_0.csv"));
  EXPECT_THROW(export_trajectories(dir, {42}, false), NotFoundError);
  EXPECT_THROW(export_trajectories(dir / "nowhere", {}, false), NotFoundError);
}

TEST(Cli, UsageErrors) {
  const fs::path dir = fresh_dir("cli");
  fs::create_directories(dir);
  EXPECT_NE(run_cli("", dir / "log0"), 0);
  EXPECT_NE(run_cli("train --level 9", dir / "log1"), 0);
  EXPECT_NE(run_cli("train --variant sac", dir / "log2"), 0);

  RunConfig bad = tiny_config(dir / "out");
  bad.train.minibatch = 0;
  nlohmann::json j = bad;
  std::ofstream(dir / "bad.json") << j.dump();
  EXPECT_EQ(run_cli("train --config " + (dir / "bad.json").string(), dir / "log3"), 2);
  EXPECT_NE(slurp(dir / "log3").find("minibatch"), std::string::npos);

  EXPECT_EQ(run_cli("export --run " + (dir / "nothing").string(), dir / "log4"), 3);
}

TEST(Cli, TrainThenEvalAndExport) {
  const fs::path dir = fresh_dir("cli_run");
  RunConfig c = tiny_config(dir / "run");
  save_run_config(c, (dir.string() + ".json"));
  const std::string cfg = "--config " + dir.string() + ".json";
  ASSERT_EQ(run_cli("train " + cfg + " --alpha-left 0.4 --record --episodes 2", dir.string() + ".log"), 0)
      << slurp(dir.string() + ".log");
  const auto echoed = load_run_config((dir / "run/config.json").string());
  EXPECT_DOUBLE_EQ(echoed.train.personalities[0].alpha(), 0.4);
  EXPECT_EQ(echoed.eval.episodes, 2);
  ASSERT_EQ(run_cli("export --run " + (dir / "run").string() + " --episode 0 --verbose-rewards",
                    dir.string() + ".log"),
            0);
  EXPECT_TRUE(fs::exists(dir / "run/trajectories/episode_0.csv"));
  const std::string ck = (dir / "run/checkpoints/").string();
  ASSERT_EQ(run_cli("eval " + cfg + " --left " + ck + "left_final.json --right " + ck +
                        "right_final.json --out " + (dir / "eval").string(),
                    dir.string() + ".log"),
            0);
  EXPECT_TRUE(fs::exists(dir / "eval/eval.json"));
}
