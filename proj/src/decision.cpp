#include "edgesim/decision.hpp"

#include <stdexcept>

namespace edgesim {

BenefitReport evaluate_benefit(const CostPair& local, const CostPair& offload, double lambda) {
  if (lambda < 0.0 || lambda > 1.0) {
    throw std::invalid_argument("evaluate_benefit: lambda must be in [0, 1]");
  }
  BenefitReport report;
  report.lambda = lambda;
  report.delay_benefit_s = local.delay_s - offload.delay_s;
  report.energy_benefit_j = local.energy_j - offload.energy_j;
  report.overall = lambda * report.delay_benefit_s + (1.0 - lambda) * report.energy_benefit_j;
  return report;
}

bool decide(const BenefitReport& benefit) { return benefit.overall > 0.0; }

double score_server(double d_now_m, double d_next_m, double alpha, double overall_benefit) {
  if (d_now_m < 0.0 || d_next_m < 0.0) {
    throw std::invalid_argument("score_server: distances must be >= 0");
  }
  if (alpha < 0.0) throw std::invalid_argument("score_server: alpha must be >= 0");
  return (d_now_m - d_next_m) + alpha * overall_benefit;
}

std::optional<ServerScore> select_server(const std::vector<ServerCandidate>& candidates,
                                         double alpha) {
  std::optional<ServerScore> best;
  for (const ServerCandidate& c : candidates) {
    ServerScore s;
    s.server_id = c.server_id;
    s.d_now_m = c.d_now_m;
    s.d_next_m = c.d_next_m;
    s.alpha = alpha;
    s.score = score_server(c.d_now_m, c.d_next_m, alpha, c.benefit.overall);
    if (!best || s.score > best->score ||
        (s.score == best->score && s.server_id < best->server_id)) {
      best = s;
    }
  }
  return best;
}

}  // namespace edgesim
