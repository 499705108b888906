#pragma once

#include <optional>
#include <utility>

#include "segmarket/equilibrium.hpp"
#include "segmarket/market.hpp"
#include "segmarket/meeting.hpp"

namespace segmarket {

/// Optimality certificate for a candidate pooled-mean distribution under a
/// reservation value u: a convex price function p_u that (a) envelopes the
/// tightness payoff phi(., u), (b) touches it on the candidate's support,
/// and (c) has equal expectation under the candidate and the prior.
struct PriceCertificate {
  double theta_c = 0.0;         // kink of p_u
  double boundary_split = 0.0;  // share of a cutoff atom assigned to the low side
  double tangency_point = 0.0;  // x_bar where the tangent line touches g
  double slope = 0.0;           // g'(ell x_bar / u) * ell / u
  double intercept = 0.0;       // p_u value at the tangency point
  bool envelope_ok = false;
  bool support_ok = false;
  bool mean_ok = false;
  double worst_envelope_violation = 0.0;
  double worst_support_gap = 0.0;
  double mean_residual = 0.0;
  bool all_ok() const noexcept { return envelope_ok && support_ok && mean_ok; }
};

/// Result of the constrained-efficient segmentation problem under a constant
/// surplus share. The curvature of t -> t/m(t) dispatches the construction:
/// concave keeps the prior fully revealed, convex pools into a binary
/// segmentation whose low side stays inactive.
struct DesignOutcome {
  OddsCurvatureClass curvature = OddsCurvatureClass::Neither;
  Segmentation segmentation;
  double u_bar = 0.0;
  std::optional<double> cutoff_type;
  std::optional<double> boundary_split;
  EquilibriumOutcome equilibrium;
  std::optional<PriceCertificate> certificate;
  double total_surplus = 0.0;
  /// Affine case only: surplus of the equally-optimal binary alternative.
  std::optional<double> binary_alt_surplus;
};

/// Conditional means around a type: E[theta | theta <= t] and
/// E[theta | theta >= t], with an atom exactly at t counted on both sides.
std::pair<double, double> conditional_means(const Prior& prior, double theta);

/// The tangent-line score G_u(theta) = g(ell X(theta)/u) +
/// g'(ell X(theta)/u) (ell/u) (theta - X(theta)) with X the upper
/// conditional mean. Strictly increasing in theta; its root locates the
/// pooling cutoff. Throws a domain error where the upper mean is too small
/// for g to be defined.
double g_u(const MeetingFunction& mf, const Prior& prior, double ell, double u,
           double theta);

/// Smallest theta with G_u(theta) >= 0, by bisection.
double find_cutoff(const MeetingFunction& mf, const Prior& prior, double ell,
                   double u);

/// Builds the price function p_u with kink at theta_c (a cutoff atom split
/// `boundary_split_low`-to-the-low-side) and verifies the three certificate
/// conditions. Throws solver_error if any check fails.
PriceCertificate certify(const MeetingFunction& mf, const Prior& prior, double ell,
                         double u, double theta_c, double boundary_split_low = 0.0);

/// Solves for the constrained-efficient segmentation given a constant buyer
/// share ell. Dispatches on the odds-map curvature; the convex branch runs a
/// scalar bisection on u whose inner step re-derives the pooling cutoff, so
/// the bilevel problem costs two nested bisections.
DesignOutcome design(const Prior& prior, const MeetingFunction& mf, double k,
                     double ell);

}  // namespace segmarket
