#pragma once

#include <string>

#include "edgesim/agent.hpp"

namespace edgesim {

enum class PolicyKind { r_ddqn, dqn, exhaustive, accept_all, local_only };

PolicyKind parse_policy(const std::string& tag);
std::string to_string(PolicyKind kind);

// Single-estimator DQN step: bootstrap argmax and value both from q_target.
// Otherwise identical to ddqn_train_step.
double dqn_train_step(const std::vector<const Experience*>& batch, QNetwork& q_eval,
                      const QNetwork& q_target, const AgentConfig& cfg);

// Depth-limited traversal of the joint action space. depth=1 returns the
// action maximising this slot's reward; larger depths additionally credit the
// queue drain of later slots under a no-new-arrivals forecast. Ties resolve
// to the lowest action index. Refuses num_terminals > 12.
ActionVector exhaustive_schedule(const SchedulerState& state, const BitQueue& queue,
                                 double slot_capacity_bits, int depth, double v_b);

ActionVector accept_all_schedule(const SchedulerState& state);

class ExhaustivePolicy final : public SchedulerPolicy {
 public:
  explicit ExhaustivePolicy(int depth = 1) : depth_(depth) {}
  ActionVector choose(const SchedulerState& state, const SchedulerContext& ctx) override;
  const char* name() const override { return "exhaustive"; }

 private:
  int depth_;
};

class AcceptAllPolicy final : public SchedulerPolicy {
 public:
  ActionVector choose(const SchedulerState& state, const SchedulerContext& ctx) override;
  const char* name() const override { return "accept_all"; }
};

}  // namespace edgesim
