#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "edgesim/baselines.hpp"
#include "edgesim/world.hpp"

namespace edgesim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SweepAxis { terminals, speed };
enum class HyperAxis { learning_rate, batch_size };

struct SweepSpec {
  SweepAxis axis = SweepAxis::terminals;
  std::vector<double> values;
};

struct HyperSweepSpec {
  HyperAxis axis = HyperAxis::learning_rate;
  std::vector<double> values;
};

// One experiment: the world, the agent hyperparameters, the policy under test
// and the run protocol. Loaded from a single versioned JSON file; unknown keys
// are rejected with their full path.
struct ExperimentSpec {
  WorldConfig world;
  AgentConfig agent;
  PolicyKind policy = PolicyKind::r_ddqn;
  int episodes = 200;
  int eval_seeds = 10;
  int depth = 1; // exhaustive traversal depth
  std::string checkpoint_dir;
  std::vector<PolicyKind> compare_policies{PolicyKind::r_ddqn, PolicyKind::dqn,
                                           PolicyKind::exhaustive};
  std::optional<SweepSpec> sweep;
  std::optional<HyperSweepSpec> hyper_sweep;
};

ExperimentSpec default_spec();

ExperimentSpec load_spec(const std::string& path);
ExperimentSpec parse_spec(const std::string& json_text); // same, from a string

// Canonical serialisation (sorted keys) and the FNV-1a hash recorded in every
// CSV output.
std::string spec_to_json(const ExperimentSpec& spec);
uint64_t config_hash(const ExperimentSpec& spec);

// Applies one sweep point: terminal count or fixed movement speed.
WorldConfig apply_sweep_point(const WorldConfig& base, SweepAxis axis, double value);

}  // namespace edgesim
