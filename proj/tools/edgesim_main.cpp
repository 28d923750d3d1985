// Command line driver: train / evaluate / compare / sweep-hyper.

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"

#include "edgesim/baselines.hpp"
#include "edgesim/experiment.hpp"

namespace {

edgesim::ExperimentSpec load_or_default(const std::string& config_path) {
  if (config_path.empty()) return edgesim::default_spec();
  return edgesim::load_spec(config_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-server edge offloading simulator and scheduler experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::string policy_tag;
  uint64_t seed = 1;
  int depth = 0; // 0 = keep config value

  app.add_option("--config", config_path, "experiment config JSON")->capture_default_str();
  app.add_option("--seed", seed, "master seed")->capture_default_str();
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--policy", policy_tag, "override run.policy");
  app.add_option("--depth", depth, "override run.depth (exhaustive traversal)");

  CLI::App* train = app.add_subcommand("train", "train the scheduler and write checkpoints");
  CLI::App* evaluate = app.add_subcommand("evaluate", "evaluation episodes for one policy");
  CLI::App* compare = app.add_subcommand("compare", "sweep comparison of the configured policies");
  CLI::App* sweep_hyper = app.add_subcommand("sweep-hyper", "loss curves over a hyperparameter axis");

  CLI11_PARSE(app, argc, argv);

  try {
    edgesim::ExperimentSpec spec = load_or_default(config_path);
    if (!policy_tag.empty()) spec.policy = edgesim::parse_policy(policy_tag);
    if (depth > 0) spec.depth = depth;

    if (train->parsed()) {
      const edgesim::TrainResult result = edgesim::cmd_train(spec, seed, out_dir);
      std::printf("wrote %s and %zu checkpoints\n", result.csv_path.c_str(),
                  result.checkpoint_paths.size());
    } else if (evaluate->parsed()) {
      const edgesim::EvalResult result = edgesim::cmd_evaluate(spec, seed, out_dir);
      std::printf("policy %s: I mean %.6g std %.6g over %zu seeds (%s)\n",
                  edgesim::to_string(spec.policy).c_str(), result.importance_mean,
                  result.importance_std, result.per_seed_importance.size(),
                  result.csv_path.c_str());
    } else if (compare->parsed()) {
      const edgesim::CompareResult result = edgesim::cmd_compare(spec, seed, out_dir);
      std::printf("wrote %s (%zu rows)\n", result.csv_path.c_str(), result.rows.size());
    } else if (sweep_hyper->parsed()) {
      const edgesim::HyperResult result = edgesim::cmd_sweep_hyper(spec, seed, out_dir);
      std::printf("wrote %s (%zu curves)\n", result.csv_path.c_str(), result.curves.size());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
