#include "pmarl/harness/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pmarl/errors.hpp"
#include "pmarl/marl/trainer.hpp"

namespace fs = std::filesystem;

namespace pmarl::harness {

namespace {

constexpr std::array<const char*, sim::kNumAgents> kSeatNames{"left", "right"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string alpha_label(double a) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", a);
  return buf;
}

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
  }
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw LoadError(where + ": not a number: '" + s + "'");
  }
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

void write_json(const fs::path& p, const nlohmann::json& j) { open_out(p) << j.dump(2) << '\n'; }

std::string metrics_header(const std::string& prefix) {
  std::string h;
  for (const auto& c : metrics_columns()) h += (h.empty() ? "" : ",") + prefix + c;
  return h;
}

std::string metrics_row(const MetricsRecord& m) {
  std::string r;
  for (double v : metrics_values(m)) r += (r.empty() ? "" : ",") + fmt(v);
  return r;
}

marl::CheckpointMeta meta_for(int seat, const marl::Trainer& t) {
  return {kSeatNames[seat], t.config().personalities[seat].alpha(), t.updates(), t.env_steps()};
}

void save_learners(const marl::Trainer& t, const fs::path& dir, const std::string& tag) {
  for (int i = 0; i < sim::kNumAgents; ++i) {
    if (!t.learner(i)) continue;
    marl::save_checkpoint((dir / (std::string(kSeatNames[i]) + "_" + tag + ".json")).string(), *t.learner(i),
                          meta_for(i, t), t.config());
  }
}

std::vector<std::string> train_row(const marl::UpdateReport& r) {
  std::vector<std::string> row{std::to_string(r.update), std::to_string(r.env_steps), std::to_string(r.episodes)};
  for (int i = 0; i < sim::kNumAgents; ++i) row.push_back(fmt(r.mean_return[i]));
  for (auto s : {sim::AgentStatus::ReachGoal, sim::AgentStatus::Collision, sim::AgentStatus::OffRoad,
                 sim::AgentStatus::Timeout}) {
    for (int i = 0; i < sim::kNumAgents; ++i) row.push_back(std::to_string(r.status_counts[i][static_cast<int>(s)]));
  }
  auto stat = [&](auto field) {
    for (int i = 0; i < sim::kNumAgents; ++i) row.push_back(r.ppo[i] ? fmt((*r.ppo[i]).*field) : "");
  };
  stat(&marl::UpdateStats::policy_loss);
  stat(&marl::UpdateStats::value_loss_self);
  stat(&marl::UpdateStats::value_loss_coop);
  stat(&marl::UpdateStats::entropy);
  stat(&marl::UpdateStats::clip_fraction);
  stat(&marl::UpdateStats::approx_kl);
  row.push_back(std::to_string(r.share_breaches));
  row.push_back(std::to_string(r.team_bound_steps));
  return row;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

}  // namespace

const std::vector<std::string>& train_metrics_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c{"update", "env_steps", "episodes"};
    auto both = [&](const std::string& base) {
      for (const char* s : kSeatNames) c.push_back(base + "_" + s);
    };
    for (const char* base : {"mean_return", "success", "collision", "offroad", "timeout", "policy_loss",
                             "value_loss_self", "value_loss_coop", "entropy", "clip_fraction", "approx_kl"}) {
      both(base);
    }
    c.push_back("share_breaches");
    c.push_back("team_bound_steps");
    return c;
  }();
  return cols;
}

TrainResult cmd_train(const RunConfig& cfg) {
  cfg.validate();
  TrainResult result;
  result.run_dir = cfg.out;
  const fs::path ckpt_dir = result.run_dir / "checkpoints";
  fs::create_directories(ckpt_dir);
  save_run_config(cfg, (result.run_dir / "config.json").string());

  std::array<std::vector<tensor::GaussianPolicyHead>, sim::kNumAgents> background;
  for (const auto& path : cfg.background_checkpoints) background[1].push_back(marl::load_checkpoint(path).policy);
  const std::array<bool, sim::kNumAgents> learn{true, background[1].empty()};

  marl::Trainer trainer(cfg.train, cfg.env, learn, background);
  save_learners(trainer, ckpt_dir, "initial");
  const int updates = cfg.train.num_updates();
  if (updates == 0) return result;

  std::ofstream metrics = open_out(result.run_dir / "metrics.csv");
  metrics << join(train_metrics_columns()) << '\n';
  for (int u = 0; u < updates; ++u) {
    marl::UpdateReport report;
    try {
      report = trainer.run_update();
    } catch (const NonFiniteError& e) {
      throw NonFiniteError("update " + std::to_string(u + 1) + ": " + e.what());
    }
    metrics << join(train_row(report)) << '\n';
    metrics.flush();
    if (cfg.train.checkpoint_every > 0 && report.update % cfg.train.checkpoint_every == 0 && u + 1 < updates) {
      save_learners(trainer, ckpt_dir, "update_" + std::to_string(report.update));
    }
  }
  save_learners(trainer, ckpt_dir, "final");
  result.updates = trainer.updates();
  result.env_steps = trainer.env_steps();

  EvalOptions opts{cfg.eval.episodes, cfg.eval.seed, cfg.eval.record};
  nlohmann::json evals = nlohmann::json::array();
  std::vector<EpisodeRecord> recorded;
  const auto& ego = trainer.learner(0)->policy;
  if (learn[1]) {
    auto r = evaluate(ego, trainer.learner(1)->policy, cfg.env, cfg.train.personalities, opts);
    result.final_eval.push_back(r.metrics);
    evals.push_back({{"background", nullptr}, {"left", r.metrics[0]}, {"right", r.metrics[1]}});
    recorded = std::move(r.episodes);
  } else {
    for (std::size_t b = 0; b < background[1].size(); ++b) {
      auto r = evaluate(ego, background[1][b], cfg.env, cfg.train.personalities, opts);
      result.final_eval.push_back(r.metrics);
      evals.push_back({{"background", cfg.background_checkpoints[b]}, {"left", r.metrics[0]}, {"right", r.metrics[1]}});
      if (b == 0) recorded = std::move(r.episodes);
    }
  }
  write_json(result.run_dir / "final_eval.json",
             {{"episodes", cfg.eval.episodes}, {"seed", cfg.eval.seed}, {"pairs", evals}});
  if (cfg.eval.record) save_episodes((result.run_dir / "episodes.jsonl").string(), recorded);
  return result;
}

EvalResult cmd_eval(const std::string& left_checkpoint, const std::string& right_checkpoint, const RunConfig& cfg) {
  cfg.validate();
  const auto left = marl::load_checkpoint(left_checkpoint);
  const auto right = marl::load_checkpoint(right_checkpoint);
  EvalResult r = evaluate(left.policy, right.policy, cfg.env, cfg.train.personalities,
                          {cfg.eval.episodes, cfg.eval.seed, cfg.eval.record});
  const fs::path out(cfg.out);
  fs::create_directories(out);
  save_run_config(cfg, (out / "config.json").string());
  write_json(out / "eval.json", {{"left_checkpoint", left_checkpoint},
                                 {"right_checkpoint", right_checkpoint},
                                 {"episodes", cfg.eval.episodes},
                                 {"seed", cfg.eval.seed},
                                 {"left", r.metrics[0]},
                                 {"right", r.metrics[1]}});
  if (cfg.eval.record) save_episodes((out / "episodes.jsonl").string(), r.episodes);
  return r;
}

void write_sweep_grid(const SweepGrid& grid, const fs::path& path) {
  std::ofstream out = open_out(path);
  out << "alpha_left,alpha_right,status,error," << metrics_header("left_") << ',' << metrics_header("right_") << '\n';
  const std::string blanks(2 * metrics_columns().size() - 1, ',');
  for (const auto& c : grid.cells) {
    out << fmt(c.alpha_left) << ',' << fmt(c.alpha_right) << ',';
    if (c.metrics) {
      out << "ok,," << metrics_row((*c.metrics)[0]) << ',' << metrics_row((*c.metrics)[1]) << '\n';
    } else {
      out << "failed," << sanitize(c.error) << ',' << blanks << '\n';
    }
  }
}

SweepGrid read_sweep_grid(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("no sweep grid at " + path.string());
  SweepGrid grid;
  std::string line;
  std::getline(in, line);
  const std::size_t ncols = metrics_columns().size();
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    const auto f = split_csv(line);
    if (f.size() != 4 + 2 * ncols) throw LoadError(where + ": wrong number of fields");
    SweepCell c;
    c.alpha_left = parse_double(f[0], where);
    c.alpha_right = parse_double(f[1], where);
    if (f[2] == "ok") {
      std::array<MetricsRecord, sim::kNumAgents> m;
      for (int i = 0; i < sim::kNumAgents; ++i) {
        std::vector<double> vals;
        for (std::size_t k = 0; k < ncols; ++k) vals.push_back(parse_double(f[4 + i * ncols + k], where));
        m[i] = metrics_from_values(vals);
      }
      c.metrics = m;
    } else if (f[2] == "failed") {
      c.error = f[3];
    } else {
      throw LoadError(where + ": unknown cell status '" + f[2] + "'");
    }
    grid.cells.push_back(c);
  }
  // Alphas in first-seen order of the left column.
  for (const auto& c : grid.cells) {
    if (std::find(grid.alphas.begin(), grid.alphas.end(), c.alpha_left) == grid.alphas.end()) {
      grid.alphas.push_back(c.alpha_left);
    }
  }
  return grid;
}

namespace {

std::optional<std::array<MetricsRecord, sim::kNumAgents>> cached_cell(const RunConfig& cell, const fs::path& dir) {
  const fs::path cfg_path = dir / "config.json";
  const fs::path eval_path = dir / "final_eval.json";
  if (!fs::exists(cfg_path) || !fs::exists(eval_path)) return std::nullopt;
  try {
    std::ifstream cin(cfg_path);
    // The output location does not affect results, so a moved sweep still hits.
    auto stored = nlohmann::json::parse(cin);
    nlohmann::json wanted = cell;
    stored.erase("out");
    wanted.erase("out");
    if (stored != wanted) return std::nullopt;
    std::ifstream ein(eval_path);
    const auto ev = nlohmann::json::parse(ein);
    const auto& pair = ev.at("pairs").at(0);
    return std::array<MetricsRecord, sim::kNumAgents>{pair.at("left").get<MetricsRecord>(),
                                                      pair.at("right").get<MetricsRecord>()};
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void write_rate_matrix(const SweepGrid& grid, const fs::path& path, const std::string& name,
                       double MetricsRecord::*field) {
  std::ofstream out = open_out(path);
  out << "alpha_left,alpha_right," << name << "_left," << name << "_right\n";
  for (const auto& c : grid.cells) {
    out << fmt(c.alpha_left) << ',' << fmt(c.alpha_right) << ',';
    if (c.metrics) {
      out << fmt((*c.metrics)[0].*field) << ',' << fmt((*c.metrics)[1].*field) << '\n';
    } else {
      out << "failed,failed\n";
    }
  }
}

// Mean collision rate of the agent holding each alpha, averaged over the
// partner's alphas.
void write_collision_curves(const SweepGrid& grid, const fs::path& path) {
  std::ofstream out = open_out(path);
  out << "alpha,collision_left,collision_right,cells_left,cells_right\n";
  for (double a : grid.alphas) {
    std::array<double, sim::kNumAgents> sum{};
    std::array<int, sim::kNumAgents> n{};
    for (const auto& c : grid.cells) {
      if (!c.metrics) continue;
      if (c.alpha_left == a) sum[0] += (*c.metrics)[0].collision_rate, n[0] += 1;
      if (c.alpha_right == a) sum[1] += (*c.metrics)[1].collision_rate, n[1] += 1;
    }
    out << fmt(a);
    for (int i = 0; i < sim::kNumAgents; ++i) out << ',' << (n[i] ? fmt(sum[i] / n[i]) : "failed");
    out << ',' << n[0] << ',' << n[1] << '\n';
  }
}

}  // namespace

SweepGrid cmd_sweep(const RunConfig& cfg) {
  cfg.validate();
  const fs::path out(cfg.out);
  fs::create_directories(out / "cells");
  save_run_config(cfg, (out / "config.json").string());
  SweepGrid grid;
  grid.alphas = cfg.sweep_alphas;
  for (double al : cfg.sweep_alphas) {
    for (double ar : cfg.sweep_alphas) {
      SweepCell cell{al, ar, std::nullopt, {}};
      RunConfig cc = cfg;
      cc.background_checkpoints.clear();
      cc.eval.record = false;
      const fs::path dir = out / "cells" / ("l" + alpha_label(al) + "_r" + alpha_label(ar));
      cc.out = dir.string();
      try {
        cc.train.personalities = {reward::PersonalityParams::from_alpha(al), reward::PersonalityParams::from_alpha(ar)};
        cell.metrics = cached_cell(cc, dir);
        if (!cell.metrics) {
          const auto r = cmd_train(cc);
          if (r.final_eval.empty()) throw ConfigError("cell has a zero training budget; nothing to evaluate");
          cell.metrics = r.final_eval.front();
        }
      } catch (const std::exception& e) {
        cell.metrics.reset();
        cell.error = sanitize(e.what());
      }
      grid.cells.push_back(std::move(cell));
    }
  }
  write_sweep_grid(grid, out / "sweep_grid.csv");
  write_rate_matrix(grid, out / "sweep_success.csv", "success", &MetricsRecord::success_rate);
  write_rate_matrix(grid, out / "sweep_collision.csv", "collision", &MetricsRecord::collision_rate);
  write_collision_curves(grid, out / "collision_curves.csv");
  return grid;
}

std::vector<CrossEvalRow> cmd_cross_eval(const std::string& ego_checkpoint,
                                         const std::vector<std::string>& backgrounds, const RunConfig& cfg) {
  cfg.validate();
  if (backgrounds.empty()) throw ConfigError("cross-eval needs at least one background checkpoint");
  const auto ego = marl::load_checkpoint(ego_checkpoint);
  std::vector<tensor::GaussianPolicyHead> bg;
  for (const auto& b : backgrounds) bg.push_back(marl::load_checkpoint(b).policy);

  std::vector<CrossEvalRow> rows;
  for (std::size_t b = 0; b < bg.size(); ++b) {
    const auto r = evaluate(ego.policy, bg[b], cfg.env, cfg.train.personalities, {cfg.eval.episodes, cfg.eval.seed, false});
    rows.push_back({backgrounds[b], r.metrics});
  }
  const fs::path out(cfg.out);
  fs::create_directories(out);
  save_run_config(cfg, (out / "config.json").string());
  std::ofstream csv = open_out(out / "cross_eval.csv");
  csv << "background," << metrics_header("ego_") << ',' << metrics_header("background_") << '\n';
  for (const auto& r : rows) {
    csv << sanitize(r.background) << ',' << metrics_row(r.metrics[0]) << ',' << metrics_row(r.metrics[1]) << '\n';
  }
  return rows;
}

std::vector<int> export_trajectories(const fs::path& run_dir, const std::vector<int>& ids, bool verbose_rewards) {
  const auto episodes = load_episodes((run_dir / "episodes.jsonl").string());
  std::map<int, const EpisodeRecord*> by_id;
  for (const auto& e : episodes) by_id[e.id] = &e;
  std::vector<int> selected;
  if (ids.empty()) {
    for (const auto& [id, _] : by_id) selected.push_back(id);
  } else {
    for (int id : ids) {
      if (!by_id.count(id)) throw NotFoundError("episode " + std::to_string(id) + " is not recorded in " + run_dir.string());
      selected.push_back(id);
    }
  }

  const fs::path dir = run_dir / "trajectories";
  fs::create_directories(dir);
  for (int id : selected) {
    const EpisodeRecord& e = *by_id.at(id);
    const std::string stem = "episode_" + std::to_string(id);
    std::ofstream csv = open_out(dir / (stem + ".csv"));
    std::ofstream jsonl = open_out(dir / (stem + ".jsonl"));
    csv << "step,agent,x,y,heading,speed,steer,accel,status";
    if (verbose_rewards) csv << ",r_dense,r_sparse,r_self,r_coop,r_self_stream,r_total,gated";
    csv << '\n';
    for (const auto& s : e.steps) {
      csv << s.step << ',' << s.agent << ',' << fmt(s.state.x) << ',' << fmt(s.state.y) << ','
          << fmt(s.state.heading) << ',' << fmt(s.state.speed) << ',' << fmt(s.action.steer) << ','
          << fmt(s.action.accel) << ',' << sim::to_string(s.status);
      nlohmann::json j = s;
      j["episode"] = id;
      j["scenario_seed"] = e.scenario_seed;
      if (verbose_rewards) {
        const auto& r = s.reward;
        csv << ',' << fmt(r.r_dense) << ',' << fmt(r.r_sparse) << ',' << fmt(r.r_self) << ',' << fmt(r.r_coop)
            << ',' << fmt(r.r_self_stream) << ',' << fmt(r.r_total) << ',' << (r.gated ? 1 : 0);
      } else {
        j.erase("reward");
      }
      csv << '\n';
      jsonl << j.dump() << '\n';
    }
  }
  return selected;
}

}  // namespace pmarl::harness
