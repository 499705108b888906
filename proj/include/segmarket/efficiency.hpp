#pragma once

#include "segmarket/market.hpp"
#include "segmarket/meeting.hpp"

namespace segmarket {

/// Diagnostic for whether a surplus split decentralizes the first best of
/// the perfect segmentation. `cutoff` = eta_ps / beta separates inactive
/// from active types; below it the buyer's surplus share may not exceed the
/// cutoff type's, above it the share must track the meeting elasticity.
struct HosiosReport {
  bool holds = false;
  double eta_ps = 0.0;
  double cutoff = 0.0;
  double lambda_at_cutoff = 0.0;
  double max_violation_below = 0.0;  // worst excess of lambda(theta)theta over the cutoff product
  double max_violation_above = 0.0;  // worst |lambda(theta) - lambda(c) eps(f(theta/eta))|
};

/// Tests both alignment conditions on every grid point, tolerance 1e-7.
/// When the cutoff falls between grid points, lambda at the cutoff is read
/// from the nearest grid point below it (the split is flat there for any
/// table this toolkit constructs, and a chord across the kink at the cutoff
/// would leak O(grid spacing) error into a 1e-7 test).
HosiosReport check_hosios(const Prior& prior, const MeetingFunction& mf, double k,
                          const SurplusSplit& split);

struct HosiosSplitResult {
  SurplusSplit split = SurplusSplit::constant(1.0);
  double eta_ps = 0.0;
  double cutoff = 0.0;
  bool clamped = false;  // some constructed value exceeded 1 before clamping
};

/// Builds the surplus split that makes the search equilibrium of the perfect
/// segmentation replicate the first best: lambda(theta) =
/// lambda_at_cutoff * eps(f(theta/eta_ps)) above the cutoff, and the cutoff
/// value itself below it.
HosiosSplitResult hosios_compatible_split(const Prior& prior,
                                          const MeetingFunction& mf, double k,
                                          double lambda_at_cutoff);

}  // namespace segmarket
