#pragma once

#include <cstdint>
#include <deque>
#include <vector>

namespace edgesim {

// One indivisible task. Sizes are in bits, priorities are positive reals.
struct TaskSpec {
  uint64_t id = 0;
  double size_bits = 0.0;
  double priority = 0.0;
  int created_slot = 0;
  int owner = 0;
};

// Per-terminal compute/power profile.
struct TerminalProfile {
  double cpu_hz = 0.0;         // CPU cycles per second
  double bits_per_cycle = 0.0; // bits processed per cycle
  double p_comp_w = 0.0;
  double p_idle_w = 0.0;
  double p_tran_w = 0.0;
};

// Per-server compute profile plus the coverage disc radius.
struct ServerProfile {
  double cpu_hz = 0.0;
  double bits_per_cycle = 0.0;
  double coverage_radius_m = 0.0;
};

struct RadioParams {
  double bandwidth_hz = 0.0;
  double noise_power_w = 0.0;
  double pathloss_exponent = 2.0;
  double reference_gain = 1.0; // channel gain at 1 m
};

struct CostPair {
  double delay_s = 0.0;
  double energy_j = 0.0;
};

struct DrainResult {
  std::vector<TaskSpec> completed;
  double bits_drained = 0.0; // includes partial progress on an oversized head
};

// FIFO queue of tasks measured in bits. A task leaves the queue only when it
// completes; if the head alone exceeds one slot's capacity it accumulates a
// progress counter across slots and completes in the slot where the remaining
// bits fit. total_bits() is the remaining load (queue length in bits).
class BitQueue {
 public:
  void push(const TaskSpec& task);

  // Removes and returns the longest FIFO prefix of whole tasks whose remaining
  // sizes sum to <= capacity_bits. When nothing completes and the queue is
  // nonempty, capacity_bits goes into the head's progress counter instead.
  // max_tasks caps how many tasks may complete (uploads stop at a destination
  // switch).
  DrainResult drain(double capacity_bits, std::size_t max_tasks = SIZE_MAX);

  // Same prefix rule as drain() but non-mutating; returns the count of tasks
  // that would complete and the sum of their priorities.
  struct Preview {
    int count = 0;
    double priority_sum = 0.0;
  };
  Preview preview_drain(double capacity_bits) const;

  double total_bits() const { return total_bits_; }
  // Sum of the full sizes of queued tasks (progress included); a task's bits
  // belong to its queue until it completes.
  double entry_bits_total() const { return total_bits_ + head_progress_bits_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::deque<TaskSpec>& entries() const { return entries_; }
  double head_progress_bits() const { return head_progress_bits_; }

 private:
  std::deque<TaskSpec> entries_;
  double head_progress_bits_ = 0.0;
  double total_bits_ = 0.0;
};

// Local queuing + processing delay and the matching compute energy.
CostPair local_cost(const TerminalProfile& profile, double comp_queue_bits, double task_bits);

// Shannon rate of the offloading link; zero gain yields rate zero.
double achievable_rate(const RadioParams& radio, double p_tran_w, double channel_gain);

// Processing delay at the server: (queue + task) / (F_n * theta_n).
double server_processing_delay(const ServerProfile& server, double server_queue_bits, double task_bits);

// Transmission + server-side delay of the offloading procedure, and the
// energy drawn while transmitting and while idling for the result.
// Throws std::domain_error when rate <= 0 (link unavailable).
CostPair offload_cost(const TerminalProfile& profile, double tran_queue_bits, double task_bits,
                      double rate_bps, const ServerProfile& server, double server_queue_bits);

// Fraction of one slot's processing capacity not consumed by the backlog.
// Deliberately unclamped: negative values signal overload depth.
double remaining_resources(const ServerProfile& server, double queue_bits, double slot_s);

}  // namespace edgesim
