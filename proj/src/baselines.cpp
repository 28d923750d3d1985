#include "edgesim/baselines.hpp"

#include <stdexcept>

namespace edgesim {

PolicyKind parse_policy(const std::string& tag) {
  if (tag == "r_ddqn") return PolicyKind::r_ddqn;
  if (tag == "dqn") return PolicyKind::dqn;
  if (tag == "exhaustive") return PolicyKind::exhaustive;
  if (tag == "accept_all") return PolicyKind::accept_all;
  if (tag == "local_only") return PolicyKind::local_only;
  throw std::invalid_argument("unknown policy tag: " + tag);
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::r_ddqn: return "r_ddqn";
    case PolicyKind::dqn: return "dqn";
    case PolicyKind::exhaustive: return "exhaustive";
    case PolicyKind::accept_all: return "accept_all";
    case PolicyKind::local_only: return "local_only";
  }
  throw std::logic_error("unreachable policy kind");
}

double dqn_train_step(const std::vector<const Experience*>& batch, QNetwork& q_eval,
                      const QNetwork& q_target, const AgentConfig& cfg) {
  return detail::td_train_step(batch, q_eval, q_target, cfg, /*double_dqn=*/false);
}

namespace {

// Sum of the drain rewards of `horizon` further slots with no new arrivals.
double future_drain_reward(BitQueue queue, double slot_capacity_bits, int horizon, double v_b) {
  double total = 0.0;
  for (int h = 0; h < horizon && !queue.empty(); ++h) {
    const DrainResult drained = queue.drain(slot_capacity_bits);
    for (const TaskSpec& task : drained.completed) total += task.priority * v_b;
  }
  return total;
}

}  // namespace

ActionVector exhaustive_schedule(const SchedulerState& state, const BitQueue& queue,
                                 double slot_capacity_bits, int depth, double v_b) {
  if (depth < 1) throw std::invalid_argument("exhaustive_schedule: depth must be >= 1");
  if (state.num_terminals() > 12) {
    throw std::invalid_argument("exhaustive_schedule: refusing more than 12 terminals");
  }

  const std::vector<uint32_t> mask = feasible_mask(state);
  ActionVector best;
  best.num_terminals = state.num_terminals();
  double best_total = 0.0;
  bool first = true;
  for (uint32_t bits : mask) {
    ActionVector action;
    action.bits = bits;
    action.num_terminals = state.num_terminals();
    double total = action_reward(state, action, queue, slot_capacity_bits, v_b);
    if (depth > 1) {
      BitQueue preview = queue;
      for (int m = 0; m < state.num_terminals(); ++m) {
        if (!action.accepts(m)) continue;
        TaskSpec task;
        task.size_bits = state.sizes[m];
        task.priority = state.priorities[m];
        task.owner = m;
        preview.push(task);
      }
      preview.drain(slot_capacity_bits); // this slot's completions are already in the reward
      total += future_drain_reward(std::move(preview), slot_capacity_bits, depth - 1, v_b);
    }
    if (first || total > best_total) { // strict >, so ties keep the lowest index
      best_total = total;
      best.bits = bits;
      first = false;
    }
  }
  return best;
}

ActionVector accept_all_schedule(const SchedulerState& state) {
  ActionVector action;
  action.num_terminals = state.num_terminals();
  action.bits = state.request_mask();
  return action;
}

ActionVector ExhaustivePolicy::choose(const SchedulerState& state, const SchedulerContext& ctx) {
  return exhaustive_schedule(state, *ctx.queue, ctx.slot_capacity_bits, depth_, ctx.v_b);
}

ActionVector AcceptAllPolicy::choose(const SchedulerState& state, const SchedulerContext& ctx) {
  return accept_all_schedule(state);
}

}  // namespace edgesim
