#include "segmarket/efficiency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "segmarket/planner.hpp"

namespace segmarket {

namespace {

constexpr double kHosiosTol = 1e-7;

double lambda_at(const Prior& prior, const SurplusSplit& split, double cutoff) {
  if (split.is_constant()) return split.ell();
  // Nearest grid point at or below the cutoff; the first point if the cutoff
  // undercuts the whole grid.
  std::size_t j0 = 0;
  for (std::size_t j = 0; j < prior.size(); ++j) {
    if (prior.grid[j] <= cutoff) j0 = j;
  }
  return split.at(prior, j0);
}

}  // namespace

HosiosReport check_hosios(const Prior& prior, const MeetingFunction& mf, double k,
                          const SurplusSplit& split) {
  split.require_non_trivial(prior);
  const PlannerOutcome fb = first_best_benchmark(prior, mf, k);

  HosiosReport report;
  report.eta_ps = fb.eta;
  report.cutoff = fb.eta / mf.beta();
  report.lambda_at_cutoff = lambda_at(prior, split, report.cutoff);
  const double cutoff_product = report.lambda_at_cutoff * report.cutoff;

  double below = -std::numeric_limits<double>::infinity();
  double above = 0.0;
  bool any_below = false;
  for (std::size_t j = 0; j < prior.size(); ++j) {
    const double theta = prior.grid[j];
    const double lam = split.at(prior, j);
    if (theta <= report.cutoff) {
      below = std::max(below, lam * theta - cutoff_product);
      any_below = true;
    } else {
      const double target =
          report.lambda_at_cutoff * mf.elasticity(mf.f(theta / fb.eta));
      above = std::max(above, std::abs(lam - target));
    }
  }
  report.max_violation_below = any_below ? below : 0.0;
  report.max_violation_above = above;
  report.holds = report.max_violation_below <= kHosiosTol &&
                 report.max_violation_above <= kHosiosTol;
  return report;
}

HosiosSplitResult hosios_compatible_split(const Prior& prior,
                                          const MeetingFunction& mf, double k,
                                          double lambda_at_cutoff) {
  if (!(lambda_at_cutoff > 0.0) || lambda_at_cutoff > 1.0) {
    throw validation_error("bad_argument", "lambda_at_cutoff must lie in (0, 1]");
  }
  const PlannerOutcome fb = first_best_benchmark(prior, mf, k);
  const double cutoff = fb.eta / mf.beta();

  HosiosSplitResult out;
  out.eta_ps = fb.eta;
  out.cutoff = cutoff;
  std::vector<double> values(prior.size());
  for (std::size_t j = 0; j < prior.size(); ++j) {
    const double theta = prior.grid[j];
    double v = lambda_at_cutoff;
    if (theta > cutoff) {
      v = lambda_at_cutoff * mf.elasticity(mf.f(theta / fb.eta));
    }
    if (v > 1.0) {
      out.clamped = true;
      v = 1.0;
    }
    values[j] = std::max(0.0, v);
  }
  out.split = SurplusSplit::table(std::move(values));
  return out;
}

}  // namespace segmarket
