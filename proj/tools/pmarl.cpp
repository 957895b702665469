// Command-line front end: train, eval, sweep, cross-eval, export.
#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "pmarl/errors.hpp"
#include "pmarl/harness/commands.hpp"

using namespace pmarl;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> level;
  std::optional<double> alpha_left;
  std::optional<double> alpha_right;
  std::optional<std::string> variant;
  std::optional<int> episodes;
  std::optional<std::string> out;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "Run configuration file")->check(CLI::ExistingFile);
  app->add_option("--seed", f.seed, "Training seed");
  app->add_option("--level", f.level, "Scenario difficulty level")->check(CLI::Range(1, 6));
  app->add_option("--alpha-left", f.alpha_left, "Left agent self weight")->check(CLI::Range(0.0, 1.0));
  app->add_option("--alpha-right", f.alpha_right, "Right agent self weight")->check(CLI::Range(0.0, 1.0));
  app->add_option("--variant", f.variant, "Learner variant")->check(CLI::IsMember({"ippo", "mappo", "pemn"}));
  app->add_option("--episodes", f.episodes, "Evaluation episodes")->check(CLI::PositiveNumber);
  app->add_option("--out", f.out, "Output directory");
}

harness::RunConfig resolve(const CommonFlags& f) {
  harness::RunConfig c = f.config.empty() ? harness::RunConfig{} : harness::load_run_config(f.config);
  if (f.seed) c.train.seed = *f.seed;
  if (f.level) c.env.level = *f.level;
  if (f.alpha_left) c.train.personalities[0] = reward::PersonalityParams::from_alpha(*f.alpha_left);
  if (f.alpha_right) c.train.personalities[1] = reward::PersonalityParams::from_alpha(*f.alpha_right);
  if (f.variant) c.train.variant = marl::variant_from_string(*f.variant);
  if (f.episodes) c.eval.episodes = *f.episodes;
  if (f.out) c.out = *f.out;
  c.validate();
  return c;
}

void print_pair(const std::array<harness::MetricsRecord, 2>& m) {
  for (int i = 0; i < 2; ++i) {
    std::printf("%-5s success %.3f collision %.3f offroad %.3f timeout %.3f efficiency %.4f\n",
                i == 0 ? "left" : "right", m[i].success_rate, m[i].collision_rate, m[i].offroad_rate,
                m[i].timeout_rate, m[i].efficiency);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Personality-modulated multi-agent driving: training and analysis"};
  app.require_subcommand(1);

  CommonFlags train_f, eval_f, sweep_f, cross_f;
  bool record = false;

  auto* train = app.add_subcommand("train", "Train a policy pair (or an ego against background checkpoints)");
  add_common(train, train_f);
  std::vector<std::string> train_bg;
  train->add_option("--background", train_bg, "Frozen right-seat checkpoints; trains only the left seat")
      ->check(CLI::ExistingFile);
  train->add_flag("--record", record, "Keep per-step records of the final evaluation");

  auto* eval = app.add_subcommand("eval", "Evaluate two checkpoints with deterministic actions");
  add_common(eval, eval_f);
  std::string left_ckpt, right_ckpt;
  eval->add_option("--left", left_ckpt, "Left seat checkpoint")->required();
  eval->add_option("--right", right_ckpt, "Right seat checkpoint")->required();
  eval->add_flag("--record", record, "Write episodes.jsonl for export");

  auto* sweep = app.add_subcommand("sweep", "Train and evaluate every personality pair of the alpha grid");
  add_common(sweep, sweep_f);

  auto* cross = app.add_subcommand("cross-eval", "Evaluate an ego against background checkpoints");
  add_common(cross, cross_f);
  std::string ego_ckpt;
  std::vector<std::string> cross_bg;
  cross->add_option("--ego", ego_ckpt, "Ego checkpoint (left seat)")->required();
  cross->add_option("--background", cross_bg, "Background checkpoints (right seat)")->required();

  auto* exp = app.add_subcommand("export", "Write trajectory files for recorded episodes");
  std::string run_dir;
  std::vector<int> episode_ids;
  bool verbose = false;
  exp->add_option("--run", run_dir, "Directory containing episodes.jsonl")->required();
  exp->add_option("--episode", episode_ids, "Episode ids (default: all)");
  exp->add_flag("--verbose-rewards", verbose, "Include the per-step reward breakdown");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      auto c = resolve(train_f);
      if (!train_bg.empty()) c.background_checkpoints = train_bg;
      if (record) c.eval.record = true;
      const auto r = harness::cmd_train(c);
      std::printf("%s: %d updates, %lld environment steps\n", r.run_dir.c_str(), r.updates,
                  static_cast<long long>(r.env_steps));
      for (const auto& m : r.final_eval) print_pair(m);
    } else if (eval->parsed()) {
      auto c = resolve(eval_f);
      if (record) c.eval.record = true;
      print_pair(harness::cmd_eval(left_ckpt, right_ckpt, c).metrics);
    } else if (sweep->parsed()) {
      const auto grid = harness::cmd_sweep(resolve(sweep_f));
      for (const auto& cell : grid.cells) {
        if (cell.metrics) {
          std::printf("[%g, %g] success %.3f/%.3f collision %.3f/%.3f\n", cell.alpha_left, cell.alpha_right,
                      (*cell.metrics)[0].success_rate, (*cell.metrics)[1].success_rate,
                      (*cell.metrics)[0].collision_rate, (*cell.metrics)[1].collision_rate);
        } else {
          std::printf("[%g, %g] failed: %s\n", cell.alpha_left, cell.alpha_right, cell.error.c_str());
        }
      }
    } else if (cross->parsed()) {
      for (const auto& row : harness::cmd_cross_eval(ego_ckpt, cross_bg, resolve(cross_f))) {
        std::printf("%s: ego success %.3f collision %.3f\n", row.background.c_str(), row.metrics[0].success_rate,
                    row.metrics[0].collision_rate);
      }
    } else if (exp->parsed()) {
      const auto ids = harness::export_trajectories(run_dir, episode_ids, verbose);
      std::printf("exported %zu episodes to %s/trajectories\n", ids.size(), run_dir.c_str());
    }
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const NotFoundError& e) {
    std::cerr << "not found: " << e.what() << '\n';
    return 3;
  } catch (const LoadError& e) {
    std::cerr << "load error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
