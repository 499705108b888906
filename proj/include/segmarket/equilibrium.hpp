#pragma once

#include <span>
#include <vector>

#include "segmarket/market.hpp"
#include "segmarket/meeting.hpp"

namespace segmarket {

/// Search equilibrium of a segmentation: buyers enter only submarkets whose
/// best-case payoff beats the reservation value u*, and u* equals their
/// realized average payoff.
struct EquilibriumOutcome {
  double u_star = 0.0;
  TightnessAllocation tightness;
  double buyer_payoff = 0.0;
  double total_surplus = 0.0;
  std::vector<bool> active;
};

/// Optimal tightness per submarket for an anticipated payoff u:
/// g(E_s[lambda theta]/u) where beta E_s[lambda theta] > u, else 0.
std::vector<double> best_response_tightness(const MeetingFunction& mf,
                                            std::span<const double> means_lambda_theta,
                                            double u);

/// k * sum_s w_s m(tau_s) E_s[lambda theta], the buyers' ex-ante payoff from
/// an allocation.
double buyer_payoff_of(const Prior& prior, const Segmentation& seg,
                       const TightnessAllocation& tau, const SurplusSplit& split,
                       const MeetingFunction& mf, double k);

/// Solves for the essentially unique search equilibrium: the fixed point of
/// u -> k sum_s w_s m(tau_s(u)) E_s[lambda theta] with tau_s(u) the best
/// response above. The map is continuous and decreasing, so a scalar
/// bisection replaces the high-dimensional solve.
EquilibriumOutcome solve_equilibrium(const Prior& prior, const Segmentation& seg,
                                     const MeetingFunction& mf, double k,
                                     const SurplusSplit& split);

}  // namespace segmarket
