#include "segmarket/planner.hpp"

#include <algorithm>
#include <cmath>

#include "segmarket/numeric.hpp"

namespace segmarket {

double surplus(const Prior& prior, const Segmentation& seg,
               const TightnessAllocation& tau, const MeetingFunction& mf,
               double k) {
  if (tau.tightness.size() != seg.size()) {
    throw validation_error("bad_argument", "tightness does not match the segmentation");
  }
  KahanSum s;
  for (std::size_t i = 0; i < seg.size(); ++i) {
    s.add(seg.submarkets[i].weight * mf.m(tau.tightness[i]) *
          seg.posterior_mean(prior, i));
  }
  return k * s.value();
}

PlannerOutcome solve_first_best(const Prior& prior, const Segmentation& seg,
                                const MeetingFunction& mf, double k) {
  if (!(k > 0.0)) throw validation_error("bad_argument", "k must be positive");
  seg.validate(prior);
  const auto means = seg.posterior_means(prior);
  const double beta = mf.beta();

  double max_mean = 0.0;
  for (double x : means) max_mean = std::max(max_mean, x);
  if (!(max_mean > 0.0)) {
    throw solver_error("infeasible",
                       "all posterior means are zero; no surplus to allocate");
  }

  // Buyer demand at multiplier eta. Weakly decreasing and continuous in eta,
  // +inf at 0, zero at beta.
  auto demand = [&](double eta) {
    KahanSum s;
    for (std::size_t i = 0; i < seg.size(); ++i) {
      if (beta * means[i] > eta) {
        s.add(seg.submarkets[i].weight * mf.f(means[i] / eta));
      }
    }
    return k * s.value();
  };

  BisectOptions opt;
  opt.value_tol = 1e-10;
  opt.max_iter = 300;
  const double eta = bisect_monotone(demand, 1e-12 * beta, beta, 1.0,
                                     /*increasing=*/false, opt);
  if (std::abs(demand(eta) - 1.0) > 1e-10) {
    throw solver_error("no_convergence", "planner multiplier did not converge");
  }

  PlannerOutcome out;
  out.eta = eta;
  out.tightness.tightness.resize(seg.size());
  out.active.resize(seg.size());
  for (std::size_t i = 0; i < seg.size(); ++i) {
    const bool on = beta * means[i] > eta;
    out.active[i] = on;
    out.tightness.tightness[i] = on ? mf.f(means[i] / eta) : 0.0;
  }
  out.total_surplus = surplus(prior, seg, out.tightness, mf, k);
  return out;
}

PlannerOutcome first_best_benchmark(const Prior& prior, const MeetingFunction& mf,
                                    double k) {
  return solve_first_best(prior, perfect_segmentation(prior), mf, k);
}

LowerCensorshipBenchmark lower_censorship_benchmark(const Prior& prior,
                                                    const MeetingFunction& mf,
                                                    double k) {
  const PlannerOutcome perfect = first_best_benchmark(prior, mf, k);
  LowerCensorshipBenchmark out;
  out.cutoff = perfect.eta / mf.beta();
  out.segmentation = lower_censorship_segmentation(prior, out.cutoff);
  out.outcome = solve_first_best(prior, out.segmentation, mf, k);
  return out;
}

}  // namespace segmarket
