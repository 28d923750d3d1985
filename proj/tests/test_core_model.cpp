#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "edgesim/core_model.hpp"
#include "edgesim/rng.hpp"

using namespace edgesim;

namespace {

TerminalProfile make_terminal(double f, double theta, double p_comp = 2.0, double p_idle = 0.1,
                              double p_tran = 1.0) {
  TerminalProfile p;
  p.cpu_hz = f;
  p.bits_per_cycle = theta;
  p.p_comp_w = p_comp;
  p.p_idle_w = p_idle;
  p.p_tran_w = p_tran;
  return p;
}

ServerProfile make_server(double f, double theta, double radius = 100.0) {
  ServerProfile p;
  p.cpu_hz = f;
  p.bits_per_cycle = theta;
  p.coverage_radius_m = radius;
  return p;
}

TaskSpec task_of(double bits, double priority = 1.0, uint64_t id = 0) {
  TaskSpec t;
  t.id = id;
  t.size_bits = bits;
  t.priority = priority;
  return t;
}

// Independent re-statement of the closed forms under test.
double oracle_local_delay(double f, double theta, double queue, double z) {
  return (queue + z) / (f * theta);
}

double oracle_rate(double w, double noise, double p, double gain) {
  return w * std::log2(1.0 + p * gain / noise);
}

// Brute-force maximal prefix with sum <= capacity, same left-to-right
// accumulation as the implementation contract.
int oracle_prefix(const std::vector<double>& sizes, double capacity) {
  double sum = 0.0;
  int count = 0;
  for (double z : sizes) {
    sum += z;
    if (sum > capacity) break;
    ++count;
  }
  return count;
}

}  // namespace

TEST_CASE("local_cost matches the direct formula") {
  const CostPair a = local_cost(make_terminal(1e9, 1.0, 2.0), 0.0, 1e6);
  CHECK(a.delay_s == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(a.energy_j == doctest::Approx(2e-3).epsilon(1e-12));

  // doubling theta halves per-bit time; queue contributes symmetrically
  const CostPair b = local_cost(make_terminal(1e9, 2.0, 2.0), 1e6, 1e6);
  CHECK(b.delay_s == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(b.energy_j == doctest::Approx(2e-3).epsilon(1e-12));
}

TEST_CASE("local_cost rejects invalid inputs") {
  CHECK_THROWS_AS(local_cost(make_terminal(0.0, 1.0), 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(local_cost(make_terminal(1e9, 1.0), -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(local_cost(make_terminal(1e9, 1.0), 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("local_cost equals an independent oracle on random inputs") {
  Rng rng(42);
  for (int i = 0; i < 10000; ++i) {
    const double f = rng.uniform(1e6, 1e10);
    const double theta = rng.uniform(1e-4, 4.0);
    const double p_comp = rng.uniform(0.01, 10.0);
    const double queue = rng.uniform(0.0, 1e8);
    const double z = rng.uniform(1.0, 1e7);
    const CostPair got = local_cost(make_terminal(f, theta, p_comp), queue, z);
    const double want_delay = oracle_local_delay(f, theta, queue, z);
    CHECK(got.delay_s == doctest::Approx(want_delay).epsilon(1e-12));
    CHECK(got.energy_j == doctest::Approx(p_comp * want_delay).epsilon(1e-12));
  }
}

TEST_CASE("achievable_rate known values") {
  RadioParams radio;
  radio.bandwidth_hz = 1e6;
  radio.noise_power_w = 1.0;
  CHECK(achievable_rate(radio, 3.0, 1.0) == doctest::Approx(2e6).epsilon(1e-12)); // log2(4)
  CHECK(achievable_rate(radio, 5.0, 0.0) == 0.0);

  RadioParams radio2;
  radio2.bandwidth_hz = 5e6;
  radio2.noise_power_w = 1e-9;
  const double got = achievable_rate(radio2, 0.5, 1e-7);
  CHECK(got == doctest::Approx(5e6 * std::log2(51.0)).epsilon(1e-12));
  CHECK(got == doctest::Approx(28362126.70985748).epsilon(1e-9)); // 5e6*log2(51), high-precision value

  CHECK_THROWS_AS(achievable_rate(radio, 1.0, -1e-9), std::invalid_argument);
}

TEST_CASE("achievable_rate is strictly increasing in gain and bandwidth") {
  Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    RadioParams radio;
    radio.bandwidth_hz = rng.uniform(1e5, 1e8);
    radio.noise_power_w = rng.uniform(1e-15, 1e-9);
    const double p = rng.uniform(0.01, 2.0);
    const double gain = rng.uniform(1e-12, 1e-3);
    const double bump = rng.uniform(1e-13, 1e-4);
    CHECK(achievable_rate(radio, p, gain + bump) > achievable_rate(radio, p, gain));
    RadioParams wider = radio;
    wider.bandwidth_hz += rng.uniform(1.0, 1e7);
    CHECK(achievable_rate(wider, p, gain) > achievable_rate(radio, p, gain));
  }
}

TEST_CASE("server_processing_delay examples") {
  CHECK(server_processing_delay(make_server(1e9, 1.0), 0.0, 1e6) ==
        doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(server_processing_delay(make_server(1e10, 1.0), 9e6, 1e6) ==
        doctest::Approx(1e-3).epsilon(1e-12));
}

TEST_CASE("offload_cost two-term sum") {
  const TerminalProfile term = make_terminal(1e9, 1.0, 2.0, 0.1, 1.0);
  const ServerProfile server = make_server(1e9, 1.0);

  const CostPair a = offload_cost(term, 0.0, 1e6, 1e6, server, 0.0);
  CHECK(a.delay_s == doctest::Approx(1.001).epsilon(1e-12));
  CHECK(a.energy_j == doctest::Approx(1.0001).epsilon(1e-12));

  const CostPair b = offload_cost(term, 0.0, 1e6, 1e6, server, 1e9);
  CHECK(b.delay_s == doctest::Approx(2.001).epsilon(1e-12));

  CHECK_THROWS_AS(offload_cost(term, 0.0, 1e6, 0.0, server, 0.0), std::domain_error);
}

TEST_CASE("offload_cost decomposes into transmission plus server term") {
  Rng rng(11);
  const TerminalProfile term = make_terminal(1e9, 1.0, 2.0, 0.3, 0.7);
  for (int i = 0; i < 10000; ++i) {
    const double tran_queue = rng.uniform(0.0, 1e8);
    const double z = rng.uniform(1.0, 1e7);
    const double rate = rng.uniform(1e3, 1e9);
    const double server_queue = rng.uniform(0.0, 1e9);
    const ServerProfile server = make_server(rng.uniform(1e8, 1e11), rng.uniform(1e-4, 2.0));

    const CostPair got = offload_cost(term, tran_queue, z, rate, server, server_queue);
    const double tran_term = (tran_queue + z) / rate;
    const double server_term = server_processing_delay(server, server_queue, z);
    CHECK(got.delay_s == doctest::Approx(tran_term + server_term).epsilon(1e-12));
    CHECK(got.energy_j ==
          doctest::Approx(term.p_tran_w * tran_term + term.p_idle_w * server_term).epsilon(1e-12));
  }
}

TEST_CASE("costs are monotone in task size and queue lengths") {
  Rng rng(13);
  const TerminalProfile term = make_terminal(2e9, 0.5, 1.5, 0.2, 0.8);
  const ServerProfile server = make_server(5e9, 0.8);
  for (int i = 0; i < 2000; ++i) {
    const double queue = rng.uniform(0.0, 1e7);
    const double z = rng.uniform(1.0, 1e6);
    const double dz = rng.uniform(1.0, 1e6);
    const double dq = rng.uniform(1.0, 1e6);

    CHECK(local_cost(term, queue, z + dz).delay_s >= local_cost(term, queue, z).delay_s);
    CHECK(local_cost(term, queue + dq, z).delay_s >= local_cost(term, queue, z).delay_s);

    const double rate = rng.uniform(1e4, 1e8);
    const double sq = rng.uniform(0.0, 1e8);
    CHECK(offload_cost(term, queue, z + dz, rate, server, sq).delay_s >=
          offload_cost(term, queue, z, rate, server, sq).delay_s);
    CHECK(offload_cost(term, queue + dq, z, rate, server, sq).energy_j >=
          offload_cost(term, queue, z, rate, server, sq).energy_j);
    CHECK(offload_cost(term, queue, z, rate, server, sq + dq).delay_s >=
          offload_cost(term, queue, z, rate, server, sq).delay_s);
  }
}

TEST_CASE("remaining_resources is linear and unclamped") {
  const ServerProfile server = make_server(1e9, 1.0);
  const double cap = 1e9 * 0.1; // one slot of bits
  CHECK(remaining_resources(server, 0.0, 0.1) == doctest::Approx(1.0));
  CHECK(remaining_resources(server, cap, 0.1) == doctest::Approx(0.0));
  CHECK(remaining_resources(server, 2.0 * cap, 0.1) == doctest::Approx(-1.0));
}

TEST_CASE("remaining_resources matches the closed form on random inputs") {
  Rng rng(17);
  for (int i = 0; i < 10000; ++i) {
    const ServerProfile server = make_server(rng.uniform(1e8, 1e11), rng.uniform(1e-4, 2.0));
    const double queue = rng.uniform(0.0, 1e10);
    const double slot = rng.uniform(1e-3, 1.0);
    const double want = 1.0 - queue / (server.cpu_hz * slot * server.bits_per_cycle);
    CHECK(remaining_resources(server, queue, slot) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("drain_queue_one_slot prefix cases") {
  BitQueue q;
  q.push(task_of(4, 1, 1));
  q.push(task_of(3, 2, 2));
  q.push(task_of(5, 3, 3));

  const DrainResult r = q.drain(8.0);
  REQUIRE(r.completed.size() == 2);
  CHECK(r.completed[0].id == 1);
  CHECK(r.completed[1].id == 2);
  CHECK(q.size() == 1);
  CHECK(q.total_bits() == doctest::Approx(5.0));
  CHECK(q.head_progress_bits() == 0.0); // leftover capacity is not carried

  BitQueue q2;
  q2.push(task_of(4));
  const DrainResult r2 = q2.drain(0.0);
  CHECK(r2.completed.empty());
  CHECK(q2.total_bits() == doctest::Approx(4.0));
}

TEST_CASE("oversized head completes across slots via the progress counter") {
  BitQueue q;
  q.push(task_of(20, 1, 9));
  q.push(task_of(3, 1, 10));

  CHECK(q.drain(8.0).completed.empty());
  CHECK(q.head_progress_bits() == doctest::Approx(8.0));
  CHECK(q.total_bits() == doctest::Approx(15.0));
  CHECK(q.entry_bits_total() == doctest::Approx(23.0));

  CHECK(q.drain(8.0).completed.empty());

  const DrainResult r = q.drain(8.0); // remaining 4 of the head, then the 3
  REQUIRE(r.completed.size() == 2);
  CHECK(r.completed[0].id == 9);
  CHECK(r.bits_drained == doctest::Approx(7.0));
  CHECK(q.empty());
  CHECK(q.total_bits() == doctest::Approx(0.0));
}

TEST_CASE("drain matches the brute-force prefix oracle on random queues") {
  Rng rng(19);
  for (int trial = 0; trial < 3000; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(0, 12));
    std::vector<double> sizes;
    BitQueue q;
    for (int i = 0; i < n; ++i) {
      const double z = rng.uniform(0.5, 20.0);
      sizes.push_back(z);
      q.push(task_of(z, 1.0, static_cast<uint64_t>(i)));
    }
    const double capacity = rng.uniform(0.0, 60.0);
    const int want = oracle_prefix(sizes, capacity);

    const BitQueue::Preview p = q.preview_drain(capacity);
    CHECK(p.count == want);

    const DrainResult r = q.drain(capacity);
    CHECK(static_cast<int>(r.completed.size()) == want);
    // Never removes a task that would overflow the capacity, never skips one
    // that fits: completed tasks are exactly the first `want` in FIFO order.
    for (int i = 0; i < want; ++i) CHECK(r.completed[i].id == static_cast<uint64_t>(i));
    if (want > 0) {
      double sum = 0.0;
      for (const TaskSpec& t : r.completed) sum += t.size_bits;
      CHECK(sum <= capacity);
    }
  }
}

TEST_CASE("BitQueue conserves bits across random push/drain sequences") {
  Rng rng(23);
  BitQueue q;
  double pushed = 0.0;
  double completed = 0.0;
  double progressed = 0.0; // partial progress currently held at the head
  uint64_t id = 0;
  for (int step = 0; step < 5000; ++step) {
    if (rng.bernoulli(0.5)) {
      const double z = rng.uniform(0.1, 30.0);
      q.push(task_of(z, 1.0, id++));
      pushed += z;
    } else {
      const DrainResult r = q.drain(rng.uniform(0.0, 25.0));
      for (const TaskSpec& t : r.completed) completed += t.size_bits;
    }
    progressed = q.head_progress_bits();
    CHECK(q.total_bits() ==
          doctest::Approx(pushed - completed - progressed).epsilon(1e-9));
    CHECK(q.entry_bits_total() == doctest::Approx(pushed - completed).epsilon(1e-9));

    double entry_sum = 0.0;
    for (const TaskSpec& t : q.entries()) entry_sum += t.size_bits;
    CHECK(q.entry_bits_total() == doctest::Approx(entry_sum).epsilon(1e-9));
  }
}
