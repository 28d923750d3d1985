#pragma once

#include <memory>
#include <string>
#include <vector>

#include "edgesim/rl_scheduler.hpp"

namespace edgesim {

// What a scheduling policy may observe of its server when choosing an action.
struct SchedulerContext {
  const BitQueue* queue = nullptr;
  double slot_capacity_bits = 0.0;
  double v_b = 10.0;
};

// Per-server offload-request scheduler. The simulation calls choose() once per
// slot and hands back the evaluated reward through feedback() the same slot.
class SchedulerPolicy {
 public:
  virtual ~SchedulerPolicy() = default;
  virtual ActionVector choose(const SchedulerState& state, const SchedulerContext& ctx) = 0;
  virtual void feedback(const SchedulerState& state, const ActionVector& action, double reward) {}
  virtual void end_episode() {}
  virtual const char* name() const = 0;
};

enum class TargetRule { double_dqn, single_dqn };

// Learning scheduler: epsilon-greedy over feasible actions, experience replay,
// TD training against a periodically hard-synced target network. The same
// class runs as the DQN baseline under TargetRule::single_dqn.
class DdqnAgent final : public SchedulerPolicy {
 public:
  DdqnAgent(int num_terminals, const AgentConfig& cfg, uint64_t seed,
            TargetRule rule = TargetRule::double_dqn);

  ActionVector choose(const SchedulerState& state, const SchedulerContext& ctx) override;
  void feedback(const SchedulerState& state, const ActionVector& action, double reward) override;
  void end_episode() override;
  const char* name() const override;

  // Evaluation mode: greedy actions, no replay, no weight updates.
  void set_learning(bool learning) { learning_ = learning; }
  bool learning() const { return learning_; }

  double epsilon() const { return epsilon_; }
  uint64_t train_steps() const { return train_steps_; }
  int buffer_size() const { return buffer_.size(); }

  // Losses of the train steps executed since the last call.
  std::vector<double> drain_losses();

  void save_checkpoint(const std::string& path) const;
  static DdqnAgent load_checkpoint(const std::string& path, const AgentConfig& cfg,
                                   TargetRule rule, uint64_t seed);

  const QNetwork& q_eval() const { return q_eval_; }
  const QNetwork& q_target() const { return q_target_; }

 private:
  DdqnAgent(const AgentConfig& cfg, TargetRule rule); // for load_checkpoint

  int num_terminals_ = 0;
  AgentConfig cfg_;
  TargetRule rule_ = TargetRule::double_dqn;
  QNetwork q_eval_;
  QNetwork q_target_;
  ReplayBuffer buffer_;
  Rng rng_;
  double epsilon_ = 1.0;
  uint64_t train_steps_ = 0;
  int slots_since_train_ = 0;
  bool learning_ = true;
  std::vector<double> losses_;

  struct Pending {
    SchedulerState state;
    uint32_t action = 0;
    double reward = 0.0;
  };
  std::unique_ptr<Pending> pending_;
};

}  // namespace edgesim
