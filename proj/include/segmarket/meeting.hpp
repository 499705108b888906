#pragma once

#include <span>
#include <vector>

#include "segmarket/errors.hpp"

namespace segmarket {

enum class MeetingFamily { Ces, UrnBall };

/// Bilateral meeting technology m(t): the probability that a seller meets a
/// buyer in a submarket with tightness t (buyers per seller). m(t)/t is the
/// buyer-side probability. Both parametric families are strictly increasing,
/// strictly concave, and satisfy m(t) <= min(1, t):
///
///   CES      m(t) = alpha*beta*t / (alpha^rho + (beta*t)^rho)^(1/rho)
///   Urn-ball m(t) = beta*t * (1 - exp(-alpha/(beta*t)))
///
/// with alpha = m(inf) and beta = lim_{t->0} m(t)/t, both in (0, 1].
class MeetingFunction {
 public:
  static MeetingFunction ces(double alpha, double beta, double rho);
  static MeetingFunction urn_ball(double alpha, double beta);

  MeetingFamily family() const noexcept { return family_; }
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  /// CES curvature parameter; throws for urn-ball.
  double rho() const;

  /// m(t). t = +inf is allowed and returns alpha; m(0) = 0.
  double m(double t) const;
  /// dm/dt for t > 0. Strictly decreasing, m'(0+) = beta.
  double m_prime(double t) const;
  /// Elasticity m'(t) * t / m(t), strictly inside (0, 1).
  double elasticity(double t) const;

  /// f(y): the unique t with 1/m'(t) = y, for y >= 1/beta. f(1/beta) = 0.
  double f(double y) const;
  /// g(y): the unique t with t/m(t) = y, for y >= 1/beta. g(1/beta) = 0.
  double g(double y) const;
  /// dg/dy for y > 1/beta, via the inverse-function rule
  /// g'(y) = m(t)^2 / (m(t) - t m'(t)) at t = g(y).
  double g_prime(double y) const;

 private:
  MeetingFunction(MeetingFamily fam, double alpha, double beta, double rho)
      : family_(fam), alpha_(alpha), beta_(beta), rho_(rho) {}

  double invert_decreasing(double target, const char* what,
                           bool of_m_prime) const;

  MeetingFamily family_;
  double alpha_;
  double beta_;
  double rho_;  // unused for urn-ball
};

enum class OddsCurvatureClass { Concave, Convex, Affine, Neither };

/// Curvature verdict for the odds map t -> t/m(t) together with the worst
/// signed chord gap observed on the probe grid (positive = convex side).
struct OddsCurvature {
  OddsCurvatureClass cls;
  double worst_second_difference;
};

const char* to_string(OddsCurvatureClass cls);

/// Classifies the curvature of t -> t/m(t) by chord tests on `probe_grid`
/// (at least 16 strictly increasing points spanning [1e-3, 1e3]). For the
/// parametric families the analytic rule decides the class (CES: rho < 1
/// concave, rho = 1 affine, rho > 1 convex; urn-ball: convex); the numeric
/// probe provides the evidence value and is the fallback authority.
OddsCurvature classify_odds(const MeetingFunction& mf,
                            std::span<const double> probe_grid);

/// 49 log-spaced probe points on [1e-3, 1e3].
std::vector<double> default_odds_probe_grid();

}  // namespace segmarket
