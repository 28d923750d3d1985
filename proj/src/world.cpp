#include "edgesim/world.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace edgesim {

void WorldConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("world config: " + what); };
  if (num_terminals < 1) fail("num_terminals must be >= 1");
  if (num_servers < 1) fail("num_servers must be >= 1");
  if (total_slots < 1) fail("total_slots must be >= 1");
  if (slot_s <= 0.0) fail("slot_s must be > 0");
  if (arena_width_m <= 0.0 || arena_height_m <= 0.0) fail("arena bounds must be > 0");
  if (static_cast<int>(servers.size()) != num_servers) {
    fail("servers list must have num_servers entries");
  }
  for (std::size_t n = 0; n < servers.size(); ++n) {
    const ServerPlacement& s = servers[n];
    const std::string where = "servers[" + std::to_string(n) + "]";
    if (s.x_m < 0.0 || s.x_m > arena_width_m || s.y_m < 0.0 || s.y_m > arena_height_m) {
      fail(where + " must lie inside the arena");
    }
    if (s.profile.cpu_hz <= 0.0 || s.profile.bits_per_cycle <= 0.0 ||
        s.profile.coverage_radius_m <= 0.0) {
      fail(where + " profile fields must be > 0");
    }
  }
  if (terminal.cpu_hz <= 0.0 || terminal.bits_per_cycle <= 0.0 || terminal.p_comp_w <= 0.0 ||
      terminal.p_idle_w <= 0.0 || terminal.p_tran_w <= 0.0) {
    fail("terminal profile fields must be > 0");
  }
  if (radio.bandwidth_hz <= 0.0 || radio.noise_power_w <= 0.0) {
    fail("radio bandwidth and noise power must be > 0");
  }
  if (radio.pathloss_exponent < 2.0) fail("pathloss_exponent must be >= 2");
  if (radio.reference_gain <= 0.0) fail("reference_gain must be > 0");
  if (lambda < 0.0 || lambda > 1.0) fail("lambda must be in [0, 1]");
  if (alpha0 < 0.0) fail("alpha0 must be >= 0");
  if (speed_min_mps < 0.0 || speed_max_mps < speed_min_mps) {
    fail("speed range must satisfy 0 <= min <= max");
  }
  if (tasks.gen_prob < 0.0 || tasks.gen_prob > 1.0) fail("tasks.gen_prob must be in [0, 1]");
  if (tasks.size_min_bits <= 0.0 || tasks.size_max_bits < tasks.size_min_bits) {
    fail("tasks size bounds must satisfy 0 < min <= max");
  }
  if (tasks.priority_min < 1 || tasks.priority_max < tasks.priority_min) {
    fail("tasks priority bounds must satisfy 1 <= min <= max");
  }
}

WorldConfig default_world_config() {
  WorldConfig cfg;
  ServerProfile server;
  server.cpu_hz = 3e10;
  server.bits_per_cycle = 1e-3;
  server.coverage_radius_m = 400.0;
  cfg.servers = {
      {250.0, 300.0, server},
      {750.0, 300.0, server},
      {500.0, 700.0, server},
  };
  cfg.terminal.cpu_hz = 2e9;
  cfg.terminal.bits_per_cycle = 1e-3;
  cfg.terminal.p_comp_w = 0.9;
  cfg.terminal.p_idle_w = 0.1;
  cfg.terminal.p_tran_w = 0.5;
  cfg.radio.bandwidth_hz = 1e7;
  cfg.radio.noise_power_w = 1e-13;
  cfg.radio.pathloss_exponent = 3.0;
  cfg.radio.reference_gain = 1e-3;
  return cfg;
}

double channel_gain(double distance_m, const RadioParams& radio) {
  const double d = std::max(distance_m, 1.0);
  return radio.reference_gain * std::pow(d, -radio.pathloss_exponent);
}

void step_mobility(TerminalState& term, const WorldConfig& cfg, Rng& rng) {
  static const double kHeadings[4][2] = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
  const uint64_t dir = rng.next_below(4);
  term.heading_x = kHeadings[dir][0];
  term.heading_y = kHeadings[dir][1];
  term.speed_mps = rng.uniform(cfg.speed_min_mps, cfg.speed_max_mps);

  term.x_m += term.speed_mps * cfg.slot_s * term.heading_x;
  term.y_m += term.speed_mps * cfg.slot_s * term.heading_y;

  // Reflecting walls; flip the heading component so dead reckoning follows.
  while (term.x_m < 0.0 || term.x_m > cfg.arena_width_m) {
    if (term.x_m < 0.0) term.x_m = -term.x_m;
    if (term.x_m > cfg.arena_width_m) term.x_m = 2.0 * cfg.arena_width_m - term.x_m;
    term.heading_x = -term.heading_x;
  }
  while (term.y_m < 0.0 || term.y_m > cfg.arena_height_m) {
    if (term.y_m < 0.0) term.y_m = -term.y_m;
    if (term.y_m > cfg.arena_height_m) term.y_m = 2.0 * cfg.arena_height_m - term.y_m;
    term.heading_y = -term.heading_y;
  }
}

double importance_metric(const std::vector<SlotLog>& logs, int total_slots) {
  if (total_slots < 1 || static_cast<int>(logs.size()) != total_slots) {
    throw std::invalid_argument("importance_metric: logs must cover slots 1..T");
  }
  double total = 0.0;
  for (const SlotLog& log : logs) {
    for (const TerminalSlotRecord& t : log.terminals) {
      for (double p : t.processed_priorities) total += p;
    }
    for (const ServerSlotRecord& s : log.servers) {
      for (double p : s.processed_priorities) total += p;
    }
  }
  return total / static_cast<double>(total_slots);
}

World::World(const WorldConfig& cfg, std::vector<SchedulerPolicy*> policies, double v_b,
             uint64_t seed)
    : cfg_(cfg),
      policies_(std::move(policies)),
      v_b_(v_b),
      rng_tasks_(split_seed(seed, 2)),
      rng_mobility_(split_seed(seed, 3)) {
  cfg_.validate();
  if (static_cast<int>(policies_.size()) != cfg_.num_servers) {
    throw std::invalid_argument("World: one scheduler policy per server required");
  }
  if (v_b_ <= 0.0) throw std::invalid_argument("World: v_b must be > 0");

  Rng rng_init(split_seed(seed, 1));
  terminals_.resize(cfg_.num_terminals);
  for (int m = 0; m < cfg_.num_terminals; ++m) {
    TerminalState& t = terminals_[m];
    t.id = m;
    t.x_m = rng_init.uniform(0.0, cfg_.arena_width_m);
    t.y_m = rng_init.uniform(0.0, cfg_.arena_height_m);
    t.profile = cfg_.terminal;
  }
  servers_.resize(cfg_.num_servers);
  for (int n = 0; n < cfg_.num_servers; ++n) {
    ServerState& s = servers_[n];
    s.id = n;
    s.x_m = cfg_.servers[n].x_m;
    s.y_m = cfg_.servers[n].y_m;
    s.profile = cfg_.servers[n].profile;
  }
  uploaders_prev_.assign(cfg_.num_servers, 0);
  logs_.reserve(cfg_.total_slots);
}

double World::server_slot_capacity(const ServerState& server) const {
  return cfg_.slot_s * server.profile.cpu_hz * server.profile.bits_per_cycle;
}

double World::terminal_slot_capacity(const TerminalState& term) const {
  return cfg_.slot_s * term.profile.cpu_hz * term.profile.bits_per_cycle;
}

double World::distance(const TerminalState& term, const ServerState& server) const {
  return std::hypot(term.x_m - server.x_m, term.y_m - server.y_m);
}

void World::account_completed(const std::vector<TaskSpec>& tasks) {
  for (const TaskSpec& task : tasks) {
    bits_completed_ += task.size_bits;
    if (!completed_ids_.insert(task.id).second) ++audit_.exclusivity_violations;
  }
}

void World::check_capacity(const DrainResult& result, double capacity_bits) {
  const double slack = 1e-9 * std::max(1.0, capacity_bits);
  if (result.bits_drained > capacity_bits + slack) ++audit_.capacity_violations;
}

void World::check_conservation() {
  double located = bits_completed_;
  for (const TerminalState& t : terminals_) {
    located += t.comp_queue.entry_bits_total() + t.tran_queue.entry_bits_total();
  }
  for (const ServerState& s : servers_) located += s.task_queue.entry_bits_total();
  const double slack = 1e-9 * std::max(1.0, bits_generated_);
  if (std::abs(located - bits_generated_) > slack) ++audit_.conservation_failures;
}

const SlotLog& World::run_slot() {
  if (slot_ >= cfg_.total_slots) throw std::logic_error("World: run past total_slots");
  ++slot_;

  SlotLog log;
  log.slot = slot_;
  log.terminals.resize(cfg_.num_terminals);
  log.servers.resize(cfg_.num_servers);

  // (1) mobility, then the slot-start broadcast snapshot of every server.
  for (TerminalState& term : terminals_) step_mobility(term, cfg_, rng_mobility_);
  std::vector<double> queue_snapshot(cfg_.num_servers);
  std::vector<double> rho_snapshot(cfg_.num_servers);
  for (int n = 0; n < cfg_.num_servers; ++n) {
    queue_snapshot[n] = servers_[n].task_queue.total_bits();
    rho_snapshot[n] = remaining_resources(servers_[n].profile, queue_snapshot[n], cfg_.slot_s);
  }

  // (2) task generation.
  std::vector<std::optional<TaskSpec>> generated(cfg_.num_terminals);
  for (int m = 0; m < cfg_.num_terminals; ++m) {
    if (!rng_tasks_.bernoulli(cfg_.tasks.gen_prob)) continue;
    TaskSpec task;
    task.id = next_task_id_++;
    task.size_bits = rng_tasks_.uniform(cfg_.tasks.size_min_bits, cfg_.tasks.size_max_bits);
    task.priority =
        static_cast<double>(rng_tasks_.uniform_int(cfg_.tasks.priority_min, cfg_.tasks.priority_max));
    task.created_slot = slot_;
    task.owner = m;
    generated[m] = task;
    ++tasks_generated_;
    bits_generated_ += task.size_bits;
  }

  // (3) stage-one decisions + (4) request delivery.
  std::vector<std::vector<int>> requests(cfg_.num_servers);
  for (int m = 0; m < cfg_.num_terminals; ++m) {
    if (!generated[m]) continue;
    TerminalState& term = terminals_[m];
    const TaskSpec& task = *generated[m];
    TerminalSlotRecord& rec = log.terminals[m];

    if (cfg_.force_local) {
      term.comp_queue.push(task);
      rec.decision = 0;
      continue;
    }

    const CostPair local = local_cost(term.profile, term.comp_queue.total_bits(), task.size_bits);
    std::vector<ServerCandidate> candidates;
    for (int n = 0; n < cfg_.num_servers; ++n) {
      const double d_now = distance(term, servers_[n]);
      if (d_now > servers_[n].profile.coverage_radius_m) continue;

      RadioParams shared = cfg_.radio;
      shared.bandwidth_hz /= static_cast<double>(std::max(1, uploaders_prev_[n]));
      const double rate =
          achievable_rate(shared, term.profile.p_tran_w, channel_gain(d_now, cfg_.radio));
      if (rate <= 0.0) continue;

      const CostPair off = offload_cost(term.profile, term.tran_queue.total_bits(), task.size_bits,
                                        rate, servers_[n].profile, queue_snapshot[n]);
      ServerCandidate candidate;
      candidate.server_id = n;
      candidate.d_now_m = d_now;
      const double next_x = term.x_m + term.speed_mps * cfg_.slot_s * term.heading_x;
      const double next_y = term.y_m + term.speed_mps * cfg_.slot_s * term.heading_y;
      candidate.d_next_m = std::hypot(next_x - servers_[n].x_m, next_y - servers_[n].y_m);
      candidate.benefit = evaluate_benefit(local, off, cfg_.lambda);
      candidates.push_back(candidate);
    }

    if (candidates.empty()) {
      ++log.forced_local;
      term.comp_queue.push(task);
      rec.decision = 0;
      continue;
    }

    const double alpha = cfg_.alpha0 * term.speed_mps;
    const std::optional<ServerScore> best = select_server(candidates, alpha);
    const ServerCandidate* chosen = nullptr;
    for (const ServerCandidate& c : candidates) {
      if (c.server_id == best->server_id) chosen = &c;
    }
    if (decide(chosen->benefit)) {
      rec.decision = 1;
      rec.chosen_server = chosen->server_id;
      requests[chosen->server_id].push_back(m);
    } else {
      term.comp_queue.push(task);
      rec.decision = 0;
    }
  }

  // (5) per-server scheduling.
  std::vector<SchedulerState> states(cfg_.num_servers);
  std::vector<ActionVector> actions(cfg_.num_servers);
  std::vector<double> rewards(cfg_.num_servers, 0.0);
  for (int n = 0; n < cfg_.num_servers; ++n) {
    std::vector<std::optional<TaskSpec>> incoming(cfg_.num_terminals);
    for (int m : requests[n]) incoming[m] = generated[m];
    states[n] = encode_state(incoming, rho_snapshot[n], cfg_.num_terminals);

    SchedulerContext ctx;
    ctx.queue = &servers_[n].task_queue;
    ctx.slot_capacity_bits = server_slot_capacity(servers_[n]);
    ctx.v_b = v_b_;
    actions[n] = policies_[n]->choose(states[n], ctx);
    actions[n].num_terminals = cfg_.num_terminals;

    // Reward is defined on the scheduling-time snapshot; evaluate before the
    // queues move on.
    rewards[n] =
        action_reward(states[n], actions[n], servers_[n].task_queue, ctx.slot_capacity_bits, v_b_);
    log.servers[n].reward = rewards[n];

    for (int m : requests[n]) {
      if (actions[n].accepts(m)) {
        terminals_[m].tran_queue.push(*generated[m]);
        terminals_[m].tran_destinations.push_back(n);
      } else {
        terminals_[m].comp_queue.push(*generated[m]);
      }
    }
  }

  // (6a) computing queues.
  for (int m = 0; m < cfg_.num_terminals; ++m) {
    const double capacity = terminal_slot_capacity(terminals_[m]);
    const DrainResult drained = terminals_[m].comp_queue.drain(capacity);
    check_capacity(drained, capacity);
    account_completed(drained.completed);
    log.terminals[m].processed_count = static_cast<int>(drained.completed.size());
    for (const TaskSpec& task : drained.completed) {
      log.terminals[m].processed_priorities.push_back(task.priority);
    }
  }

  // (6b) uploads at an equal share of the bandwidth per destination server.
  std::vector<int> upload_dest(cfg_.num_terminals, -1);
  std::vector<int> uploader_count(cfg_.num_servers, 0);
  for (int m = 0; m < cfg_.num_terminals; ++m) {
    TerminalState& term = terminals_[m];
    if (term.tran_queue.empty()) continue;
    const int dest = term.tran_destinations.front();
    if (distance(term, servers_[dest]) > servers_[dest].profile.coverage_radius_m) {
      ++log.stalled_uploads; // out of the destination's coverage: bits stall
      continue;
    }
    upload_dest[m] = dest;
    ++uploader_count[dest];
  }
  for (int m = 0; m < cfg_.num_terminals; ++m) {
    if (upload_dest[m] < 0) continue;
    TerminalState& term = terminals_[m];
    const int dest = upload_dest[m];

    RadioParams shared = cfg_.radio;
    shared.bandwidth_hz /= static_cast<double>(uploader_count[dest]);
    const double d = distance(term, servers_[dest]);
    const double rate = achievable_rate(shared, term.profile.p_tran_w, channel_gain(d, cfg_.radio));
    const double capacity = rate * cfg_.slot_s;

    // Transmit only the leading run of tasks bound for the same server.
    std::size_t run = 0;
    while (run < term.tran_destinations.size() && term.tran_destinations[run] == dest) ++run;
    const DrainResult sent = term.tran_queue.drain(capacity, run);
    check_capacity(sent, capacity);
    for (const TaskSpec& task : sent.completed) {
      term.tran_destinations.pop_front();
      servers_[dest].task_queue.push(task);
    }
  }
  uploaders_prev_ = uploader_count;

  // (6c) server queues.
  for (int n = 0; n < cfg_.num_servers; ++n) {
    const double capacity = server_slot_capacity(servers_[n]);
    const DrainResult drained = servers_[n].task_queue.drain(capacity);
    check_capacity(drained, capacity);
    account_completed(drained.completed);
    log.servers[n].processed_count = static_cast<int>(drained.completed.size());
    for (const TaskSpec& task : drained.completed) {
      log.servers[n].processed_priorities.push_back(task.priority);
    }
    log.servers[n].queue_bits_end = servers_[n].task_queue.total_bits();
  }

  // (7) learning feedback.
  for (int n = 0; n < cfg_.num_servers; ++n) {
    policies_[n]->feedback(states[n], actions[n], rewards[n]);
  }

  // (8) audits and the log.
  check_conservation();
  logs_.push_back(std::move(log));
  return logs_.back();
}

void World::run_all() {
  while (slot_ < cfg_.total_slots) run_slot();
}

double World::importance() const { return importance_metric(logs_, cfg_.total_slots); }

}  // namespace edgesim
