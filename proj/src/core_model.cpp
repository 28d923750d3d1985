#include "edgesim/core_model.hpp"

#include <cmath>
#include <stdexcept>

namespace edgesim {

namespace {

void check_terminal_profile(const TerminalProfile& p) {
  if (p.cpu_hz <= 0.0 || p.bits_per_cycle <= 0.0 || p.p_comp_w <= 0.0 || p.p_idle_w <= 0.0 ||
      p.p_tran_w <= 0.0) {
    throw std::invalid_argument("invalid terminal profile: all fields must be > 0");
  }
}

void check_server_profile(const ServerProfile& p) {
  if (p.cpu_hz <= 0.0 || p.bits_per_cycle <= 0.0) {
    throw std::invalid_argument("invalid server profile: all fields must be > 0");
  }
}

}  // namespace

void BitQueue::push(const TaskSpec& task) {
  entries_.push_back(task);
  total_bits_ += task.size_bits;
}

DrainResult BitQueue::drain(double capacity_bits, std::size_t max_tasks) {
  DrainResult result;
  if (capacity_bits < 0.0) capacity_bits = 0.0;

  // Accumulating prefix sum, so ties against the capacity resolve exactly the
  // same way as a left-to-right oracle.
  double used = 0.0;
  while (!entries_.empty() && result.completed.size() < max_tasks) {
    const double remaining = entries_.front().size_bits - head_progress_bits_;
    if (used + remaining > capacity_bits) break;
    used += remaining;
    total_bits_ -= remaining;
    result.completed.push_back(entries_.front());
    entries_.pop_front();
    head_progress_bits_ = 0.0;
  }

  if (result.completed.empty() && !entries_.empty() && capacity_bits > 0.0 && max_tasks > 0) {
    // Oversized head: carry partial progress so the queue cannot stall forever.
    head_progress_bits_ += capacity_bits;
    total_bits_ -= capacity_bits;
    used = capacity_bits;
  }

  // Incremental bookkeeping leaves rounding dust once the queue empties.
  if (entries_.empty()) {
    total_bits_ = 0.0;
    head_progress_bits_ = 0.0;
  }

  result.bits_drained = used;
  return result;
}

BitQueue::Preview BitQueue::preview_drain(double capacity_bits) const {
  Preview preview;
  double used = 0.0;
  double progress = head_progress_bits_;
  for (const TaskSpec& task : entries_) {
    const double remaining = task.size_bits - progress;
    progress = 0.0;
    if (used + remaining > capacity_bits) break;
    used += remaining;
    preview.count += 1;
    preview.priority_sum += task.priority;
  }
  return preview;
}

CostPair local_cost(const TerminalProfile& profile, double comp_queue_bits, double task_bits) {
  check_terminal_profile(profile);
  if (task_bits <= 0.0) throw std::invalid_argument("local_cost: task_bits must be > 0");
  if (comp_queue_bits < 0.0) throw std::invalid_argument("local_cost: comp_queue_bits must be >= 0");

  CostPair cost;
  cost.delay_s = (comp_queue_bits + task_bits) / (profile.cpu_hz * profile.bits_per_cycle);
  cost.energy_j = profile.p_comp_w * cost.delay_s;
  return cost;
}

double achievable_rate(const RadioParams& radio, double p_tran_w, double channel_gain) {
  if (radio.bandwidth_hz <= 0.0 || radio.noise_power_w <= 0.0) {
    throw std::invalid_argument("achievable_rate: bandwidth and noise power must be > 0");
  }
  if (channel_gain < 0.0) throw std::invalid_argument("achievable_rate: channel_gain must be >= 0");
  return radio.bandwidth_hz * std::log2(1.0 + p_tran_w * channel_gain / radio.noise_power_w);
}

double server_processing_delay(const ServerProfile& server, double server_queue_bits,
                               double task_bits) {
  check_server_profile(server);
  if (task_bits <= 0.0) throw std::invalid_argument("server_processing_delay: task_bits must be > 0");
  return (server_queue_bits + task_bits) / (server.cpu_hz * server.bits_per_cycle);
}

CostPair offload_cost(const TerminalProfile& profile, double tran_queue_bits, double task_bits,
                      double rate_bps, const ServerProfile& server, double server_queue_bits) {
  check_terminal_profile(profile);
  if (task_bits <= 0.0) throw std::invalid_argument("offload_cost: task_bits must be > 0");
  if (rate_bps <= 0.0) throw std::domain_error("offload_cost: link unavailable (rate <= 0)");

  const double tran_delay = (tran_queue_bits + task_bits) / rate_bps;
  const double server_delay = server_processing_delay(server, server_queue_bits, task_bits);

  CostPair cost;
  cost.delay_s = tran_delay + server_delay;
  cost.energy_j = profile.p_tran_w * tran_delay + profile.p_idle_w * server_delay;
  return cost;
}

double remaining_resources(const ServerProfile& server, double queue_bits, double slot_s) {
  check_server_profile(server);
  if (slot_s <= 0.0) throw std::invalid_argument("remaining_resources: slot_s must be > 0");
  return 1.0 - queue_bits / (server.cpu_hz * slot_s * server.bits_per_cycle);
}

}  // namespace edgesim
