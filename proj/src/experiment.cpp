#include "edgesim/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"

#include "edgesim/agent.hpp"
#include "edgesim/baselines.hpp"
#include "edgesim/csv.hpp"
#include "edgesim/world.hpp"

namespace fs = std::filesystem;

namespace edgesim {

namespace {

constexpr uint64_t kAgentStream = 100;
constexpr uint64_t kEpisodeStream = 10000;
constexpr uint64_t kEvalStream = 20000;
constexpr uint64_t kCompareStream = 30000;

bool is_learned(PolicyKind kind) {
  return kind == PolicyKind::r_ddqn || kind == PolicyKind::dqn;
}

TargetRule rule_of(PolicyKind kind) {
  return kind == PolicyKind::dqn ? TargetRule::single_dqn : TargetRule::double_dqn;
}

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;
};

Stats summarize(const std::vector<double>& values) {
  Stats s;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

std::string hash_comment(const ExperimentSpec& spec, uint64_t seed) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "config_hash=%016llx seed=%llu",
                static_cast<unsigned long long>(config_hash(spec)),
                static_cast<unsigned long long>(seed));
  return buf;
}

std::vector<DdqnAgent> load_agents(const ExperimentSpec& spec, PolicyKind kind, int num_terminals,
                                   const std::string& dir) {
  std::vector<DdqnAgent> agents;
  for (int n = 0; n < spec.world.num_servers; ++n) {
    const std::string path = checkpoint_path(dir, kind, num_terminals, n);
    if (!fs::exists(path)) {
      throw std::runtime_error("missing checkpoint for policy " + to_string(kind) + ": " + path);
    }
    agents.push_back(DdqnAgent::load_checkpoint(path, spec.agent, rule_of(kind), 0));
    agents.back().set_learning(false);
  }
  return agents;
}

// One evaluation episode; returns the importance metric of the run.
double run_eval_once(const ExperimentSpec& spec, const WorldConfig& world_cfg, PolicyKind kind,
                     std::vector<DdqnAgent>* learned, uint64_t world_seed,
                     std::vector<SlotLog>* logs_out) {
  WorldConfig cfg = world_cfg;
  std::vector<ExhaustivePolicy> exhaustive;
  std::vector<AcceptAllPolicy> trivial;
  std::vector<SchedulerPolicy*> policies;

  if (is_learned(kind)) {
    for (DdqnAgent& agent : *learned) policies.push_back(&agent);
  } else if (kind == PolicyKind::exhaustive) {
    exhaustive.assign(cfg.num_servers, ExhaustivePolicy(spec.depth));
    for (ExhaustivePolicy& p : exhaustive) policies.push_back(&p);
  } else {
    if (kind == PolicyKind::local_only) cfg.force_local = true;
    trivial.assign(cfg.num_servers, AcceptAllPolicy());
    for (AcceptAllPolicy& p : trivial) policies.push_back(&p);
  }

  World world(cfg, policies, spec.agent.base_reward, world_seed);
  world.run_all();
  if (logs_out) *logs_out = world.logs();
  return world.importance();
}

void write_slotlog_ndjson(const std::string& path, const std::vector<SlotLog>& logs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (const SlotLog& log : logs) {
    nlohmann::json j;
    j["slot"] = log.slot;
    nlohmann::json terminals = nlohmann::json::array();
    for (const TerminalSlotRecord& t : log.terminals) {
      terminals.push_back({{"xi", t.processed_count},
                           {"priorities", t.processed_priorities},
                           {"decision", t.decision},
                           {"server", t.chosen_server}});
    }
    j["terminals"] = terminals;
    nlohmann::json servers = nlohmann::json::array();
    for (const ServerSlotRecord& s : log.servers) {
      servers.push_back({{"xi", s.processed_count},
                         {"priorities", s.processed_priorities},
                         {"reward", s.reward},
                         {"queue_bits", s.queue_bits_end}});
    }
    j["servers"] = servers;
    j["forced_local"] = log.forced_local;
    j["stalled_uploads"] = log.stalled_uploads;
    out << j.dump() << "\n";
  }
}

void write_run_summary(const std::string& path, const ExperimentSpec& spec, uint64_t seed,
                       const std::vector<SlotLog>& logs, int num_servers) {
  CsvWriter csv(path);
  csv.comment(hash_comment(spec, seed));
  std::vector<std::string> header{"slot"};
  for (int n = 0; n < num_servers; ++n) header.push_back("reward_s" + std::to_string(n));
  header.push_back("I_to_date");
  for (int n = 0; n < num_servers; ++n) header.push_back("queue_bits_s" + std::to_string(n));
  csv.header(header);

  double priority_total = 0.0;
  for (const SlotLog& log : logs) {
    for (const TerminalSlotRecord& t : log.terminals) {
      for (double p : t.processed_priorities) priority_total += p;
    }
    for (const ServerSlotRecord& s : log.servers) {
      for (double p : s.processed_priorities) priority_total += p;
    }
    std::vector<std::string> row{std::to_string(log.slot)};
    for (const ServerSlotRecord& s : log.servers) row.push_back(csv_num(s.reward));
    row.push_back(csv_num(priority_total / static_cast<double>(log.slot)));
    for (const ServerSlotRecord& s : log.servers) row.push_back(csv_num(s.queue_bits_end));
    csv.row(row);
  }
}

}  // namespace

std::string checkpoint_path(const std::string& dir, PolicyKind policy, int num_terminals,
                            int server) {
  return (fs::path(dir) / (to_string(policy) + "_M" + std::to_string(num_terminals) + "_server" +
                           std::to_string(server) + ".ckpt"))
      .string();
}

TrainCurve run_training(const ExperimentSpec& spec, uint64_t seed,
                        std::vector<DdqnAgent>* agents_out) {
  if (!is_learned(spec.policy)) {
    throw std::invalid_argument("train requires a learnable policy (r_ddqn or dqn)");
  }

  std::vector<DdqnAgent> agents;
  agents.reserve(spec.world.num_servers);
  for (int n = 0; n < spec.world.num_servers; ++n) {
    agents.emplace_back(spec.world.num_terminals, spec.agent,
                        split_seed(seed, kAgentStream + static_cast<uint64_t>(n)),
                        rule_of(spec.policy));
  }

  TrainCurve curve;
  for (int episode = 1; episode <= spec.episodes; ++episode) {
    std::vector<SchedulerPolicy*> policies;
    for (DdqnAgent& agent : agents) policies.push_back(&agent);
    World world(spec.world, policies, spec.agent.base_reward,
                split_seed(seed, kEpisodeStream + static_cast<uint64_t>(episode)));
    world.run_all();

    double loss_sum = 0.0;
    int loss_count = 0;
    for (DdqnAgent& agent : agents) {
      for (double loss : agent.drain_losses()) {
        loss_sum += loss;
        ++loss_count;
      }
      agent.end_episode();
    }
    curve.episode_mean_loss.push_back(
        loss_count > 0 ? loss_sum / loss_count : std::numeric_limits<double>::quiet_NaN());
    curve.episode_epsilon.push_back(agents.front().epsilon());
  }

  if (agents_out) *agents_out = std::move(agents);
  return curve;
}

TrainResult cmd_train(const ExperimentSpec& spec, uint64_t seed, const std::string& out_dir) {
  fs::create_directories(out_dir);

  std::vector<DdqnAgent> agents;
  TrainResult result;
  result.curve = run_training(spec, seed, &agents);

  result.csv_path = (fs::path(out_dir) / ("train_" + to_string(spec.policy) + ".csv")).string();
  CsvWriter csv(result.csv_path);
  csv.comment(hash_comment(spec, seed));
  csv.header({"episode", "mean_loss", "epsilon"});
  for (std::size_t e = 0; e < result.curve.episode_mean_loss.size(); ++e) {
    csv.row({std::to_string(e + 1), csv_num(result.curve.episode_mean_loss[e]),
             csv_num(result.curve.episode_epsilon[e])});
  }

  for (int n = 0; n < spec.world.num_servers; ++n) {
    const std::string path =
        checkpoint_path(out_dir, spec.policy, spec.world.num_terminals, n);
    agents[n].save_checkpoint(path);
    result.checkpoint_paths.push_back(path);
  }
  return result;
}

EvalResult cmd_evaluate(const ExperimentSpec& spec, uint64_t seed, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const std::string ckpt_dir = spec.checkpoint_dir.empty() ? out_dir : spec.checkpoint_dir;

  std::vector<DdqnAgent> learned;
  if (is_learned(spec.policy)) {
    learned = load_agents(spec, spec.policy, spec.world.num_terminals, ckpt_dir);
  }

  EvalResult result;
  for (int i = 0; i < spec.eval_seeds; ++i) {
    const uint64_t world_seed = split_seed(seed, kEvalStream + static_cast<uint64_t>(i));
    std::vector<SlotLog> logs;
    const double importance = run_eval_once(spec, spec.world, spec.policy, &learned, world_seed,
                                            i == 0 ? &logs : nullptr);
    result.per_seed_importance.push_back(importance);
    if (i == 0) {
      write_slotlog_ndjson(
          (fs::path(out_dir) / ("slotlog_" + to_string(spec.policy) + "_seed0.ndjson")).string(),
          logs);
      write_run_summary(
          (fs::path(out_dir) / ("run_summary_" + to_string(spec.policy) + "_seed0.csv")).string(),
          spec, seed, logs, spec.world.num_servers);
    }
  }

  const Stats stats = summarize(result.per_seed_importance);
  result.importance_mean = stats.mean;
  result.importance_std = stats.stddev;

  result.csv_path = (fs::path(out_dir) / ("evaluate_" + to_string(spec.policy) + ".csv")).string();
  CsvWriter csv(result.csv_path);
  csv.comment(hash_comment(spec, seed));
  csv.header({"seed_index", "world_seed", "importance"});
  for (int i = 0; i < spec.eval_seeds; ++i) {
    csv.row({std::to_string(i),
             std::to_string(split_seed(seed, kEvalStream + static_cast<uint64_t>(i))),
             csv_num(result.per_seed_importance[i])});
  }
  return result;
}

CompareResult cmd_compare(const ExperimentSpec& spec, uint64_t seed, const std::string& out_dir) {
  if (!spec.sweep) throw std::invalid_argument("compare requires run.sweep in the config");
  fs::create_directories(out_dir);
  const std::string ckpt_dir = spec.checkpoint_dir.empty() ? out_dir : spec.checkpoint_dir;

  CompareResult result;
  for (std::size_t point = 0; point < spec.sweep->values.size(); ++point) {
    const double value = spec.sweep->values[point];
    const WorldConfig world_cfg = apply_sweep_point(spec.world, spec.sweep->axis, value);

    for (PolicyKind kind : spec.compare_policies) {
      std::vector<DdqnAgent> learned;
      if (is_learned(kind)) {
        learned = load_agents(spec, kind, world_cfg.num_terminals, ckpt_dir);
      }

      CompareRow row;
      row.sweep_value = value;
      row.policy = kind;
      row.seeds = spec.eval_seeds;
      for (int i = 0; i < spec.eval_seeds; ++i) {
        // Same world seeds across policies at a sweep point.
        const uint64_t world_seed =
            split_seed(seed, kCompareStream + 1009 * static_cast<uint64_t>(point) +
                                 static_cast<uint64_t>(i));
        row.per_seed_importance.push_back(
            run_eval_once(spec, world_cfg, kind, &learned, world_seed, nullptr));
      }
      const Stats stats = summarize(row.per_seed_importance);
      row.importance_mean = stats.mean;
      row.importance_std = stats.stddev;
      result.rows.push_back(std::move(row));
    }
  }

  result.csv_path = (fs::path(out_dir) / "compare.csv").string();
  CsvWriter csv(result.csv_path);
  csv.comment(hash_comment(spec, seed));
  csv.header({"sweep_value", "policy", "I_mean", "I_std", "seeds"});
  for (const CompareRow& row : result.rows) {
    csv.row({csv_num(row.sweep_value), to_string(row.policy), csv_num(row.importance_mean),
             csv_num(row.importance_std), std::to_string(row.seeds)});
  }
  return result;
}

HyperResult cmd_sweep_hyper(const ExperimentSpec& spec, uint64_t seed, const std::string& out_dir) {
  if (!spec.hyper_sweep) throw std::invalid_argument("sweep-hyper requires run.hyper_sweep");
  fs::create_directories(out_dir);

  HyperResult result;
  for (double value : spec.hyper_sweep->values) {
    ExperimentSpec setting = spec;
    if (spec.hyper_sweep->axis == HyperAxis::learning_rate) {
      setting.agent.learning_rate = value;
    } else {
      setting.agent.batch_size = static_cast<int>(value);
      if (setting.agent.batch_size < 1) {
        throw std::invalid_argument("sweep-hyper: batch_size values must be >= 1");
      }
    }
    HyperCurve curve;
    curve.setting = value;
    curve.curve = run_training(setting, seed);
    result.curves.push_back(std::move(curve));
  }

  result.csv_path = (fs::path(out_dir) / "hyper_sweep.csv").string();
  CsvWriter csv(result.csv_path);
  csv.comment(hash_comment(spec, seed));
  csv.header({"setting", "episode", "mean_loss", "epsilon"});
  for (const HyperCurve& curve : result.curves) {
    for (std::size_t e = 0; e < curve.curve.episode_mean_loss.size(); ++e) {
      csv.row({csv_num(curve.setting), std::to_string(e + 1),
               csv_num(curve.curve.episode_mean_loss[e]), csv_num(curve.curve.episode_epsilon[e])});
    }
  }
  return result;
}

}  // namespace edgesim
