#pragma once

#include <cstdint>
#include <deque>
#include <unordered_set>
#include <vector>

#include "edgesim/agent.hpp"
#include "edgesim/core_model.hpp"
#include "edgesim/decision.hpp"
#include "edgesim/rl_scheduler.hpp"

namespace edgesim {

struct TaskGenParams {
  double gen_prob = 0.6;       // per terminal per slot
  double size_min_bits = 2e5;
  double size_max_bits = 2e6;
  int priority_min = 1;
  int priority_max = 5;
};

struct ServerPlacement {
  double x_m = 0.0;
  double y_m = 0.0;
  ServerProfile profile;
};

struct WorldConfig {
  int num_terminals = 10;
  int num_servers = 3;
  int total_slots = 200; // T
  double slot_s = 0.1;   // pi
  double arena_width_m = 1000.0;
  double arena_height_m = 1000.0;
  std::vector<ServerPlacement> servers;
  TerminalProfile terminal;
  RadioParams radio;
  double lambda = 0.5; // delay/energy preference
  double alpha0 = 0.1; // score weight per m/s of terminal speed
  double speed_min_mps = 5.0;
  double speed_max_mps = 15.0;
  TaskGenParams tasks;
  bool force_local = false; // local-only sanity policy

  void validate() const; // throws std::invalid_argument with the failing field
};

WorldConfig default_world_config();

struct TerminalState {
  int id = 0;
  double x_m = 0.0;
  double y_m = 0.0;
  double speed_mps = 0.0;
  double heading_x = 1.0; // unit axis vector (east/west/south/north)
  double heading_y = 0.0;
  TerminalProfile profile;
  BitQueue comp_queue;
  BitQueue tran_queue;
  std::deque<int> tran_destinations; // lockstep with tran_queue entries
};

struct ServerState {
  int id = 0;
  double x_m = 0.0;
  double y_m = 0.0;
  ServerProfile profile;
  BitQueue task_queue;
};

struct TerminalSlotRecord {
  int processed_count = 0;             // xi_m
  std::vector<double> processed_priorities;
  int decision = -1;                   // -1 no task, 0 local, 1 offload
  int chosen_server = -1;              // K_m(t) when decision == 1
};

struct ServerSlotRecord {
  int processed_count = 0; // xi_n
  std::vector<double> processed_priorities;
  double reward = 0.0;     // R_n(t)
  double queue_bits_end = 0.0;
};

struct SlotLog {
  int slot = 0;
  std::vector<TerminalSlotRecord> terminals;
  std::vector<ServerSlotRecord> servers;
  int forced_local = 0;    // decisions forced local by missing coverage
  int stalled_uploads = 0; // uploads stalled out of coverage this slot
};

// Deterministic path-loss channel gain, flat inside 1 m.
double channel_gain(double distance_m, const RadioParams& radio);

// Slot-start mobility update: resample heading (four axis directions) and
// speed, advance one slot, reflect at the arena walls.
void step_mobility(TerminalState& term, const WorldConfig& cfg, Rng& rng);

// Time-averaged priority throughput (the objective I).
double importance_metric(const std::vector<SlotLog>& logs, int total_slots);

struct AuditCounters {
  uint64_t capacity_violations = 0;
  uint64_t conservation_failures = 0;
  uint64_t exclusivity_violations = 0;
};

// The discrete-time world. Policies are owned by the caller, one per server,
// and are invoked in server-id order; all state mutation happens on the
// calling thread in the order documented at run_slot().
class World {
 public:
  World(const WorldConfig& cfg, std::vector<SchedulerPolicy*> policies, double v_b,
        uint64_t seed);

  // Advances one slot:
  //   1. mobility update; snapshot of every server's queue length and rho
  //   2. per-terminal task generation
  //   3. stage-one offload decisions against the snapshot (bandwidth estimated
  //      from the previous slot's uploader counts)
  //   4. requests delivered to the selected servers
  //   5. per-server scheduling; accepted tasks enter the owner's offloading
  //      queue, rejected and local tasks enter the computing queue
  //   6. queue drains: computing queues, then uploads (equal bandwidth share
  //      among this slot's uploaders; completed tasks join the server queues),
  //      then server queues
  //   7. rewards evaluated on the scheduling-time snapshot and fed back
  //   8. audits and the slot log
  const SlotLog& run_slot();

  void run_all(); // total_slots slots

  int current_slot() const { return slot_; }
  const std::vector<SlotLog>& logs() const { return logs_; }
  double importance() const;
  const AuditCounters& audit() const { return audit_; }

  const std::vector<TerminalState>& terminals() const { return terminals_; }
  const std::vector<ServerState>& servers() const { return servers_; }
  uint64_t tasks_generated() const { return tasks_generated_; }
  double bits_generated() const { return bits_generated_; }
  double bits_completed() const { return bits_completed_; }

 private:
  double server_slot_capacity(const ServerState& server) const;
  double terminal_slot_capacity(const TerminalState& term) const;
  double distance(const TerminalState& term, const ServerState& server) const;
  void account_completed(const std::vector<TaskSpec>& tasks);
  void check_capacity(const DrainResult& result, double capacity_bits);
  void check_conservation();

  WorldConfig cfg_;
  std::vector<SchedulerPolicy*> policies_;
  double v_b_ = 10.0;
  int slot_ = 0;

  std::vector<TerminalState> terminals_;
  std::vector<ServerState> servers_;
  std::vector<int> uploaders_prev_; // per server, last slot's uploader count

  Rng rng_tasks_;
  Rng rng_mobility_;
  uint64_t next_task_id_ = 1;

  std::vector<SlotLog> logs_;
  AuditCounters audit_;
  uint64_t tasks_generated_ = 0;
  double bits_generated_ = 0.0;
  double bits_completed_ = 0.0;
  std::unordered_set<uint64_t> completed_ids_;
};

}  // namespace edgesim
