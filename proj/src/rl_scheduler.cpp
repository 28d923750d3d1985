#include "edgesim/rl_scheduler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace edgesim {

uint32_t SchedulerState::request_mask() const {
  uint32_t mask = 0;
  for (int m = 0; m < num_terminals(); ++m) {
    if (sizes[m] > 0.0) mask |= 1u << m;
  }
  return mask;
}

int ActionVector::accepted_count() const { return std::popcount(bits); }

ReplayBuffer::ReplayBuffer(int capacity) : capacity_(capacity) {
  if (capacity <= 0) throw std::invalid_argument("ReplayBuffer: capacity must be > 0");
  entries_.reserve(capacity);
}

void ReplayBuffer::push(Experience experience) {
  if (!std::isfinite(experience.reward)) {
    throw std::invalid_argument("ReplayBuffer: reward must be finite");
  }
  if (size() < capacity_) {
    entries_.push_back(std::move(experience));
  } else {
    entries_[cursor_] = std::move(experience);
  }
  cursor_ = (cursor_ + 1) % capacity_;
}

std::vector<const Experience*> ReplayBuffer::sample(int batch_size, Rng& rng) const {
  if (entries_.empty()) throw std::invalid_argument("ReplayBuffer: cannot sample when empty");
  std::vector<const Experience*> batch(batch_size);
  for (int i = 0; i < batch_size; ++i) {
    batch[i] = &entries_[rng.next_below(entries_.size())];
  }
  return batch;
}

SchedulerState encode_state(const std::vector<std::optional<TaskSpec>>& requests, double rho,
                            int num_terminals) {
  if (static_cast<int>(requests.size()) > num_terminals) {
    throw std::invalid_argument("encode_state: more request slots than terminals");
  }
  SchedulerState state;
  state.sizes.assign(num_terminals, 0.0);
  state.priorities.assign(num_terminals, 0.0);
  state.rho = rho;
  for (int m = 0; m < static_cast<int>(requests.size()); ++m) {
    if (!requests[m]) continue;
    state.sizes[m] = requests[m]->size_bits;
    state.priorities[m] = requests[m]->priority;
  }
  return state;
}

std::vector<uint32_t> feasible_mask(const SchedulerState& state) {
  const uint32_t requests = state.request_mask();
  std::vector<uint32_t> mask;
  mask.reserve(std::size_t{1} << std::popcount(requests));
  // Enumerate subsets of `requests` in ascending order by scattering a dense
  // counter over the set bits.
  std::vector<int> bit_pos;
  for (int m = 0; m < state.num_terminals(); ++m) {
    if ((requests >> m) & 1u) bit_pos.push_back(m);
  }
  const uint32_t count = 1u << bit_pos.size();
  for (uint32_t dense = 0; dense < count; ++dense) {
    uint32_t action = 0;
    for (std::size_t i = 0; i < bit_pos.size(); ++i) {
      if ((dense >> i) & 1u) action |= 1u << bit_pos[i];
    }
    mask.push_back(action);
  }
  std::sort(mask.begin(), mask.end());
  return mask;
}

Eigen::VectorXd state_to_input(const SchedulerState& state, const AgentConfig& cfg) {
  const int m = state.num_terminals();
  Eigen::VectorXd x(2 * m + 1);
  for (int i = 0; i < m; ++i) x(i) = state.sizes[i] / cfg.norm_size_bits;
  for (int i = 0; i < m; ++i) x(m + i) = state.priorities[i] / cfg.norm_priority;
  x(2 * m) = std::max(state.rho, cfg.rho_input_floor);
  return x;
}

double task_reward(double v_b, double priority) {
  if (v_b <= 0.0) throw std::invalid_argument("task_reward: v_b must be > 0");
  return v_b * priority;
}

double immediate_benefit(const BitQueue& queue_after_accepts, double slot_capacity_bits,
                         double v_b) {
  return queue_after_accepts.preview_drain(slot_capacity_bits).priority_sum * v_b;
}

int waiting_slots(double queue_bits, double accepted_bits, double slot_capacity_bits) {
  if (slot_capacity_bits <= 0.0) {
    throw std::invalid_argument("waiting_slots: slot capacity must be > 0");
  }
  const double slots = std::ceil((queue_bits + accepted_bits) / slot_capacity_bits);
  return std::max(1, static_cast<int>(slots));
}

double expected_benefit(const std::vector<double>& per_terminal_rewards,
                        const ActionVector& action, int waiting_slots) {
  if (waiting_slots < 1) throw std::invalid_argument("expected_benefit: waiting_slots must be >= 1");
  double sum = 0.0;
  for (std::size_t m = 0; m < per_terminal_rewards.size(); ++m) {
    if (action.accepts(static_cast<int>(m))) sum += per_terminal_rewards[m];
  }
  return sum / static_cast<double>(waiting_slots);
}

double slot_reward(double c_r, double e_r) { return c_r + e_r; }

double action_reward(const SchedulerState& state, const ActionVector& action,
                     const BitQueue& queue, double slot_capacity_bits, double v_b) {
  BitQueue preview = queue;
  double accepted_bits = 0.0;
  std::vector<double> rewards(state.num_terminals(), 0.0);
  for (int m = 0; m < state.num_terminals(); ++m) {
    if (state.sizes[m] > 0.0) rewards[m] = task_reward(v_b, state.priorities[m]);
    if (!action.accepts(m)) continue;
    if (state.sizes[m] <= 0.0) {
      throw std::invalid_argument("action_reward: action accepts a terminal without a request");
    }
    TaskSpec task;
    task.size_bits = state.sizes[m];
    task.priority = state.priorities[m];
    task.owner = m;
    preview.push(task);
    accepted_bits += task.size_bits;
  }
  const double c_r = immediate_benefit(preview, slot_capacity_bits, v_b);
  const int n_wait = waiting_slots(queue.total_bits(), accepted_bits, slot_capacity_bits);
  const double e_r = expected_benefit(rewards, action, n_wait);
  return slot_reward(c_r, e_r);
}

uint32_t select_action_masked(const std::vector<double>& q_of_mask,
                              const std::vector<uint32_t>& mask, double epsilon, Rng& rng) {
  if (epsilon < 0.0 || epsilon > 1.0) {
    throw std::invalid_argument("select_action: epsilon must be in [0, 1]");
  }
  if (mask.empty()) return 0; // no-op action is always feasible
  if (q_of_mask.size() != mask.size()) {
    throw std::invalid_argument("select_action: q/mask size mismatch");
  }
  if (rng.next_double() < epsilon) {
    return mask[rng.next_below(mask.size())];
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < mask.size(); ++i) {
    if (q_of_mask[i] > q_of_mask[best]) best = i; // ties keep the lowest index
  }
  return mask[best];
}

uint32_t select_action(const Eigen::VectorXd& q_values, const std::vector<uint32_t>& mask,
                       double epsilon, Rng& rng) {
  std::vector<double> q_of_mask(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) q_of_mask[i] = q_values(mask[i]);
  return select_action_masked(q_of_mask, mask, epsilon, rng);
}

double decay_epsilon(const AgentConfig& cfg, double epsilon) {
  return std::max(cfg.epsilon_min, epsilon * cfg.epsilon_decay);
}

namespace detail {

double td_train_step(const std::vector<const Experience*>& batch, QNetwork& q_eval,
                     const QNetwork& q_target, const AgentConfig& cfg, bool double_dqn) {
  if (batch.empty()) throw std::invalid_argument("train step: empty batch");
  if (!q_eval.same_architecture(q_target)) {
    throw std::invalid_argument("train step: network architectures differ");
  }

  const int b = static_cast<int>(batch.size());
  const int in_dim = q_eval.input_dim();
  Eigen::MatrixXd states(in_dim, b);
  Eigen::MatrixXd next_states(in_dim, b);
  std::vector<uint32_t> actions(b);
  for (int i = 0; i < b; ++i) {
    states.col(i) = state_to_input(batch[i]->state, cfg);
    next_states.col(i) = state_to_input(batch[i]->next_state, cfg);
    actions[i] = batch[i]->action;
  }

  // Bootstrap targets. Hidden activations are batched; output units are only
  // evaluated on each next state's feasible actions.
  const Eigen::MatrixXd target_hidden = q_target.hidden_forward(next_states);
  Eigen::MatrixXd eval_hidden;
  if (double_dqn) eval_hidden = q_eval.hidden_forward(next_states);

  Eigen::VectorXd targets(b);
  for (int i = 0; i < b; ++i) {
    const std::vector<uint32_t> mask = feasible_mask(batch[i]->next_state);
    double bootstrap = 0.0;
    if (double_dqn) {
      uint32_t best = mask[0];
      double best_q = q_eval.output_unit(mask[0], eval_hidden.col(i));
      for (std::size_t k = 1; k < mask.size(); ++k) {
        const double q = q_eval.output_unit(mask[k], eval_hidden.col(i));
        if (q > best_q) {
          best_q = q;
          best = mask[k];
        }
      }
      bootstrap = q_target.output_unit(best, target_hidden.col(i));
    } else {
      bootstrap = q_target.output_unit(mask[0], target_hidden.col(i));
      for (std::size_t k = 1; k < mask.size(); ++k) {
        bootstrap = std::max(bootstrap, q_target.output_unit(mask[k], target_hidden.col(i)));
      }
    }
    targets(i) = batch[i]->reward + cfg.gamma * bootstrap;
  }

  return q_eval.train_step(states, actions, targets, cfg.learning_rate);
}

}  // namespace detail

double ddqn_train_step(const std::vector<const Experience*>& batch, QNetwork& q_eval,
                       const QNetwork& q_target, const AgentConfig& cfg) {
  return detail::td_train_step(batch, q_eval, q_target, cfg, /*double_dqn=*/true);
}

}  // namespace edgesim
