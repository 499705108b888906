#include "segmarket/equilibrium.hpp"

#include <algorithm>
#include <cmath>

#include "segmarket/numeric.hpp"
#include "segmarket/planner.hpp"

namespace segmarket {

std::vector<double> best_response_tightness(const MeetingFunction& mf,
                                            std::span<const double> means_lambda_theta,
                                            double u) {
  if (!(u > 0.0)) {
    throw validation_error("bad_argument", "anticipated payoff u must be positive");
  }
  std::vector<double> tau(means_lambda_theta.size(), 0.0);
  for (std::size_t s = 0; s < means_lambda_theta.size(); ++s) {
    if (mf.beta() * means_lambda_theta[s] > u) {
      tau[s] = mf.g(means_lambda_theta[s] / u);
    }
  }
  return tau;
}

double buyer_payoff_of(const Prior& prior, const Segmentation& seg,
                       const TightnessAllocation& tau, const SurplusSplit& split,
                       const MeetingFunction& mf, double k) {
  if (tau.tightness.size() != seg.size()) {
    throw validation_error("bad_argument", "tightness does not match the segmentation");
  }
  const auto means_lt = seg.means_lambda_theta(prior, split);
  KahanSum s;
  for (std::size_t i = 0; i < seg.size(); ++i) {
    s.add(seg.submarkets[i].weight * mf.m(tau.tightness[i]) * means_lt[i]);
  }
  return k * s.value();
}

EquilibriumOutcome solve_equilibrium(const Prior& prior, const Segmentation& seg,
                                     const MeetingFunction& mf, double k,
                                     const SurplusSplit& split) {
  if (!(k > 0.0)) throw validation_error("bad_argument", "k must be positive");
  seg.validate(prior);
  split.require_non_trivial(prior);

  const auto means_lt = seg.means_lambda_theta(prior, split);
  const double beta = mf.beta();
  double hi = 0.0;
  for (double x : means_lt) hi = std::max(hi, beta * x);
  if (!(hi > 0.0)) {
    throw assumption_error("non_triviality",
                           "no submarket offers buyers a positive payoff");
  }

  auto weights = [&](std::size_t s) { return seg.submarkets[s].weight; };

  // Average payoff map Phi(u); decreasing and continuous, with
  // Phi(0+) = alpha k E[lambda theta] > 0 and Phi(hi) = 0, so the fixed
  // point lies strictly inside (0, hi) and we never evaluate the endpoints.
  auto phi_map = [&](double u) {
    KahanSum s;
    for (std::size_t i = 0; i < means_lt.size(); ++i) {
      if (beta * means_lt[i] > u) {
        s.add(weights(i) * mf.m(mf.g(means_lt[i] / u)) * means_lt[i]);
      }
    }
    return k * s.value();
  };

  double lo = 0.0, hi_b = hi, u = 0.5 * hi;
  for (int i = 0; i < 200; ++i) {
    u = 0.5 * (lo + hi_b);
    const double v = phi_map(u);
    if (std::abs(v - u) <= 1e-12 * std::max(1e-2, u)) break;
    if (v > u) {
      lo = u;
    } else {
      hi_b = u;
    }
    if (hi_b - lo <= 1e-16 * hi) break;
  }
  if (std::abs(phi_map(u) - u) > 1e-11) {
    throw solver_error("no_convergence", "equilibrium fixed point did not converge");
  }

  EquilibriumOutcome out;
  out.u_star = u;
  out.tightness.tightness = best_response_tightness(mf, means_lt, u);
  out.active.resize(seg.size());
  for (std::size_t i = 0; i < seg.size(); ++i) {
    out.active[i] = out.tightness.tightness[i] > 0.0;
  }
  // Equilibria satisfy the buyer-mass constraint by construction; a residual
  // here signals an internal error, not bad input.
  if (feasibility_residual(seg, out.tightness, k) > 1e-9) {
    throw solver_error("infeasible_equilibrium",
                       "equilibrium tightness violates the buyer mass constraint");
  }
  out.buyer_payoff = buyer_payoff_of(prior, seg, out.tightness, split, mf, k);
  out.total_surplus = surplus(prior, seg, out.tightness, mf, k);
  return out;
}

}  // namespace segmarket
