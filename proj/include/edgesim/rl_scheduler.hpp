#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "edgesim/core_model.hpp"
#include "edgesim/qnet.hpp"
#include "edgesim/rng.hpp"

namespace edgesim {

// Per-server RL state: request sizes and priorities indexed by terminal
// (zero where no request arrived this slot) plus the remaining-resource ratio.
struct SchedulerState {
  std::vector<double> sizes;
  std::vector<double> priorities;
  double rho = 0.0;

  int num_terminals() const { return static_cast<int>(sizes.size()); }
  // Bit m set iff terminal m has a pending request.
  uint32_t request_mask() const;
};

// Joint accept/reject vector over terminals, encoded as a bitmask. The mask
// doubles as the action's index into the Q-network output.
struct ActionVector {
  uint32_t bits = 0;
  int num_terminals = 0;

  bool accepts(int terminal) const { return (bits >> terminal) & 1u; }
  int accepted_count() const;
};

struct Experience {
  SchedulerState state;
  uint32_t action = 0;
  double reward = 0.0;
  SchedulerState next_state;
};

// Fixed-capacity ring buffer; overwrites the oldest experience once full.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(int capacity);

  void push(Experience experience);
  int size() const { return static_cast<int>(entries_.size()); }
  int capacity() const { return capacity_; }
  bool full() const { return size() == capacity_; }
  const Experience& at(int index) const { return entries_[index]; }

  // Uniform sample with replacement.
  std::vector<const Experience*> sample(int batch_size, Rng& rng) const;

 private:
  int capacity_ = 0;
  int cursor_ = 0;
  std::vector<Experience> entries_;
};

struct AgentConfig {
  double gamma = 0.9;
  double epsilon_start = 1.0;
  double epsilon_min = 0.05;
  double epsilon_decay = 0.9995; // multiplicative, applied per train step
  double learning_rate = 0.01;
  int batch_size = 64;
  int buffer_capacity = 2000;
  int target_sync_period = 100; // train steps between hard target copies
  int train_period = 4;         // slots between train steps once the buffer is full
  double base_reward = 0.1;     // v_b
  std::vector<int> hidden_sizes{128, 128};
  // Input normalisation only; raw values stay in SchedulerState. rho enters
  // the network floored so a deeply overloaded queue cannot blow up the
  // activations (SGD at lr 0.01 diverges otherwise).
  double norm_size_bits = 2e6;
  double norm_priority = 5.0;
  double rho_input_floor = -5.0;
};

// --- state/action plumbing ---------------------------------------------

SchedulerState encode_state(const std::vector<std::optional<TaskSpec>>& requests, double rho,
                            int num_terminals);

// All action indices whose accepted set is a subset of the requesting
// terminals, in ascending index order. Index 0 (accept nothing) is always
// present.
std::vector<uint32_t> feasible_mask(const SchedulerState& state);

Eigen::VectorXd state_to_input(const SchedulerState& state, const AgentConfig& cfg);

// --- reward evaluation ---------------------------------------------------

double task_reward(double v_b, double priority);

// v_b-weighted priority sum of the tasks that would complete this slot from
// the post-acceptance queue (non-mutating drain preview).
double immediate_benefit(const BitQueue& queue_after_accepts, double slot_capacity_bits,
                         double v_b);

// Post-acceptance backlog expressed in whole slots; never less than one.
int waiting_slots(double queue_bits, double accepted_bits, double slot_capacity_bits);

double expected_benefit(const std::vector<double>& per_terminal_rewards,
                        const ActionVector& action, int waiting_slots);

double slot_reward(double c_r, double e_r);

// Full reward of taking `action` on `state` given the server queue snapshot:
// immediate benefit of the post-acceptance queue plus the expected benefit of
// the accepted requests.
double action_reward(const SchedulerState& state, const ActionVector& action,
                     const BitQueue& queue, double slot_capacity_bits, double v_b);

// --- action selection and learning ---------------------------------------

// Epsilon-greedy over the feasible set. q_values covers all 2^M actions.
uint32_t select_action(const Eigen::VectorXd& q_values, const std::vector<uint32_t>& mask,
                       double epsilon, Rng& rng);

// Same, with q_of_mask[i] the value of mask[i] (avoids scoring infeasible actions).
uint32_t select_action_masked(const std::vector<double>& q_of_mask,
                              const std::vector<uint32_t>& mask, double epsilon, Rng& rng);

double decay_epsilon(const AgentConfig& cfg, double epsilon);

// One double-DQN step: the bootstrap action comes from q_eval, its value from
// q_target, both restricted to the next state's feasible set. Returns the
// pre-update mean squared error.
double ddqn_train_step(const std::vector<const Experience*>& batch, QNetwork& q_eval,
                       const QNetwork& q_target, const AgentConfig& cfg);

namespace detail {
// Shared TD machinery for the DDQN step and the single-estimator DQN baseline.
double td_train_step(const std::vector<const Experience*>& batch, QNetwork& q_eval,
                     const QNetwork& q_target, const AgentConfig& cfg, bool double_dqn);
}  // namespace detail

}  // namespace edgesim
