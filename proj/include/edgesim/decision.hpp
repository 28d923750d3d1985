#pragma once

#include <optional>
#include <vector>

#include "edgesim/core_model.hpp"

namespace edgesim {

// Delay/energy savings of offloading over local processing, blended by lambda.
struct BenefitReport {
  double delay_benefit_s = 0.0;
  double energy_benefit_j = 0.0;
  double overall = 0.0;
  double lambda = 0.0;
};

struct ServerScore {
  int server_id = -1;
  double score = 0.0;
  double d_now_m = 0.0;
  double d_next_m = 0.0;
  double alpha = 0.0;
};

struct OffloadDecision {
  bool offload = false;                 // D_m(t)
  std::optional<int> chosen_server;     // K_m(t), present iff offload
};

struct ServerCandidate {
  int server_id = -1;
  double d_now_m = 0.0;
  double d_next_m = 0.0;
  BenefitReport benefit;
};

BenefitReport evaluate_benefit(const CostPair& local, const CostPair& offload, double lambda);

// Offload iff the overall benefit is strictly positive.
bool decide(const BenefitReport& benefit);

// Ranking score: distance trend toward the server plus alpha-weighted benefit.
double score_server(double d_now_m, double d_next_m, double alpha, double overall_benefit);

// Highest-scoring candidate; ties go to the lowest server id. Empty candidate
// set means no coverage and the caller must process locally.
std::optional<ServerScore> select_server(const std::vector<ServerCandidate>& candidates,
                                         double alpha);

}  // namespace edgesim
