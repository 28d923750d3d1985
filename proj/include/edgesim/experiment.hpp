#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edgesim/config.hpp"

namespace edgesim {

// Training loop artifacts. Episode vectors are aligned: index e is episode
// e+1. Episodes with no train steps (buffer still filling) record NaN loss.
struct TrainCurve {
  std::vector<double> episode_mean_loss;
  std::vector<double> episode_epsilon;
};

struct TrainResult {
  TrainCurve curve;
  std::vector<std::string> checkpoint_paths; // one per server
  std::string csv_path;
};

struct EvalResult {
  std::vector<double> per_seed_importance;
  double importance_mean = 0.0;
  double importance_std = 0.0;
  std::string csv_path;
};

struct CompareRow {
  double sweep_value = 0.0;
  PolicyKind policy = PolicyKind::r_ddqn;
  double importance_mean = 0.0;
  double importance_std = 0.0;
  int seeds = 0;
  std::vector<double> per_seed_importance;
};

struct CompareResult {
  std::vector<CompareRow> rows;
  std::string csv_path;
};

struct HyperCurve {
  double setting = 0.0;
  TrainCurve curve;
};

struct HyperResult {
  std::vector<HyperCurve> curves;
  std::string csv_path;
};

// Conventional checkpoint filename inside a directory.
std::string checkpoint_path(const std::string& dir, PolicyKind policy, int num_terminals,
                            int server);

// Runs the training episodes without touching the filesystem. Used by
// cmd_train and cmd_sweep_hyper so a single-element hyper sweep reproduces
// cmd_train's curve exactly.
TrainCurve run_training(const ExperimentSpec& spec, uint64_t seed,
                        std::vector<class DdqnAgent>* agents_out = nullptr);

// Trains spec.policy (r_ddqn or dqn), writes the per-episode loss CSV and one
// checkpoint per server into out_dir.
TrainResult cmd_train(const ExperimentSpec& spec, uint64_t seed, const std::string& out_dir);

// Evaluation episodes (greedy actions, no learning) for spec.policy; writes
// per-seed importance plus the first seed's slot log and run summary.
EvalResult cmd_evaluate(const ExperimentSpec& spec, uint64_t seed, const std::string& out_dir);

// Sweeps run.sweep and evaluates every policy in run.compare_policies at each
// point with shared world seeds.
CompareResult cmd_compare(const ExperimentSpec& spec, uint64_t seed, const std::string& out_dir);

// One training curve per hyperparameter setting, single CSV.
HyperResult cmd_sweep_hyper(const ExperimentSpec& spec, uint64_t seed, const std::string& out_dir);

}  // namespace edgesim
