#pragma once

#include "segmarket/market.hpp"
#include "segmarket/meeting.hpp"

namespace segmarket {

/// First-best allocation for a fixed segmentation: the multiplier eta on the
/// buyer-mass constraint, the tightness it induces, and the surplus achieved.
struct PlannerOutcome {
  double eta = 0.0;
  TightnessAllocation tightness;
  double total_surplus = 0.0;
  std::vector<bool> active;
};

/// k * sum_s w_s m(tau_s) E_s[theta]. Accepts infeasible candidates too.
double surplus(const Prior& prior, const Segmentation& seg,
               const TightnessAllocation& tau, const MeetingFunction& mf, double k);

/// Solves the planner's problem for a fixed segmentation: finds the unique
/// eta in (0, beta) at which the surplus-maximizing tightness
///   tau_s = f(E_s[theta]/eta) if beta E_s[theta] > eta, else 0
/// exhausts the unit buyer mass. The allocation equalizes the marginal value
/// of a buyer across active submarkets.
PlannerOutcome solve_first_best(const Prior& prior, const Segmentation& seg,
                                const MeetingFunction& mf, double k);

/// First best of the perfect segmentation, which attains the first-best
/// surplus over all consistent segmentations.
PlannerOutcome first_best_benchmark(const Prior& prior, const MeetingFunction& mf,
                                    double k);

/// Opt-in benchmark: pools all types at or below eta/beta (the inactive
/// region of the perfect first best) and reveals the rest. Ties the perfect
/// benchmark's surplus because the pooled submarket stays inactive.
struct LowerCensorshipBenchmark {
  Segmentation segmentation;
  PlannerOutcome outcome;
  double cutoff = 0.0;
};
LowerCensorshipBenchmark lower_censorship_benchmark(const Prior& prior,
                                                    const MeetingFunction& mf,
                                                    double k);

}  // namespace segmarket
