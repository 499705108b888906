#include "segmarket/meeting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "segmarket/numeric.hpp"

namespace segmarket {

namespace {

constexpr double kBracketCap = 1e12;

void check_probability_param(double v, const char* name) {
  if (!(v > 0.0) || v > 1.0 || !std::isfinite(v)) {
    throw validation_error("bad_argument",
                           std::string(name) + " must lie in (0, 1]");
  }
}

// log((alpha^rho + (beta t)^rho)^(1/rho)) computed without overflow.
double log_ces_denominator(double alpha, double beta, double rho, double t) {
  const double la = std::log(alpha);
  const double lbt = std::log(beta) + std::log(t);
  const double hi = std::max(la, lbt);
  const double lo = std::min(la, lbt);
  return hi + std::log1p(std::exp(rho * (lo - hi))) / rho;
}

// 1 - (1 + x) e^{-x}, accurate near x = 0 where the direct form cancels.
double one_minus_1px_emx(double x) {
  if (x < 1e-3) {
    const double x2 = x * x;
    return x2 * (0.5 - x / 3.0 + x2 / 8.0 - x2 * x / 30.0);
  }
  return 1.0 - (1.0 + x) * std::exp(-x);
}

}  // namespace

MeetingFunction MeetingFunction::ces(double alpha, double beta, double rho) {
  check_probability_param(alpha, "alpha");
  check_probability_param(beta, "beta");
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw validation_error("bad_argument", "rho must be a positive real");
  }
  return MeetingFunction(MeetingFamily::Ces, alpha, beta, rho);
}

MeetingFunction MeetingFunction::urn_ball(double alpha, double beta) {
  check_probability_param(alpha, "alpha");
  check_probability_param(beta, "beta");
  return MeetingFunction(MeetingFamily::UrnBall, alpha, beta, 0.0);
}

double MeetingFunction::rho() const {
  if (family_ != MeetingFamily::Ces) {
    throw validation_error("bad_argument", "rho is defined only for CES");
  }
  return rho_;
}

double MeetingFunction::m(double t) const {
  if (std::isnan(t) || t < 0.0) {
    throw validation_error("bad_argument", "tightness must be nonnegative");
  }
  if (t == 0.0) return 0.0;
  if (std::isinf(t)) return alpha_;
  if (family_ == MeetingFamily::Ces) {
    return alpha_ * beta_ * t *
           std::exp(-log_ces_denominator(alpha_, beta_, rho_, t));
  }
  // -expm1 keeps 1 - e^{-x} accurate for small x; for x large the
  // exponential underflows to 0, which is the correct limit.
  const double x = alpha_ / (beta_ * t);
  return beta_ * t * (-std::expm1(-x));
}

double MeetingFunction::m_prime(double t) const {
  if (!(t > 0.0)) {
    throw validation_error("bad_argument", "m_prime requires t > 0");
  }
  if (std::isinf(t)) return 0.0;
  if (family_ == MeetingFamily::Ces) {
    // m'(t) = alpha^{rho+1} beta / (alpha^rho + (beta t)^rho)^{(rho+1)/rho}
    const double log_denom = log_ces_denominator(alpha_, beta_, rho_, t);
    return std::exp((rho_ + 1.0) * (std::log(alpha_) - log_denom) +
                    std::log(beta_));
  }
  // m'(t) = beta [1 - (1 + x) e^{-x}] with x = alpha/(beta t)
  const double x = alpha_ / (beta_ * t);
  return beta_ * one_minus_1px_emx(x);
}

double MeetingFunction::elasticity(double t) const {
  if (!(t > 0.0)) {
    throw validation_error("bad_argument", "elasticity requires t > 0");
  }
  if (family_ == MeetingFamily::Ces) {
    // alpha^rho / (alpha^rho + (beta t)^rho)
    const double z = rho_ * (std::log(beta_) + std::log(t) - std::log(alpha_));
    return 1.0 / (1.0 + std::exp(z));
  }
  return m_prime(t) * t / m(t);
}

double MeetingFunction::invert_decreasing(double target, const char* what,
                                          bool of_m_prime) const {
  // Solves q(t) = target where q = m' (decreasing) or q = m/t (decreasing).
  // Bracket grows geometrically from [0, 1] until it straddles, capped at
  // 1e12.
  auto q = [&](double t) {
    return of_m_prime ? m_prime(t) : m(t) / t;
  };
  double hi = 1.0;
  while (q(hi) > target) {
    hi *= 10.0;
    if (hi > kBracketCap) {
      throw solver_error("bracket_failure",
                         std::string("no bracket below 1e12 inverting ") + what);
    }
  }
  double lo = 0.0;
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (q(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-13 * std::max(lo, 1e-300)) break;
  }
  return 0.5 * (lo + hi);
}

double MeetingFunction::f(double y) const {
  const double inv_beta = 1.0 / beta_;
  if (std::isnan(y) || y < inv_beta * (1.0 - 1e-14)) {
    throw validation_error("bad_argument", "f requires y >= 1/beta");
  }
  if (y <= inv_beta) return 0.0;
  if (family_ == MeetingFamily::Ces && rho_ == 1.0) {
    // 1/m' = (alpha + beta t)^2 / (alpha^2 beta)
    return (std::sqrt(alpha_ * alpha_ * beta_ * y) - alpha_) / beta_;
  }
  return invert_decreasing(1.0 / y, "1/m'", /*of_m_prime=*/true);
}

double MeetingFunction::g(double y) const {
  const double inv_beta = 1.0 / beta_;
  if (std::isnan(y) || y < inv_beta * (1.0 - 1e-14)) {
    throw validation_error("bad_argument", "g requires y >= 1/beta");
  }
  if (y <= inv_beta) return 0.0;
  if (family_ == MeetingFamily::Ces && rho_ == 1.0) {
    // t/m = (alpha + beta t) / (alpha beta)
    return alpha_ * (beta_ * y - 1.0) / beta_;
  }
  return invert_decreasing(1.0 / y, "t/m", /*of_m_prime=*/false);
}

double MeetingFunction::g_prime(double y) const {
  if (family_ == MeetingFamily::Ces && rho_ == 1.0) return alpha_;
  const double t = g(y);
  if (t <= 0.0) {
    throw validation_error("bad_argument", "g_prime requires y > 1/beta");
  }
  const double mv = m(t);
  const double denom = mv - t * m_prime(t);
  if (!(denom > 0.0)) {
    throw solver_error("degenerate_derivative", "g'(y) is unbounded here");
  }
  return mv * mv / denom;
}

const char* to_string(OddsCurvatureClass cls) {
  switch (cls) {
    case OddsCurvatureClass::Concave: return "concave";
    case OddsCurvatureClass::Convex: return "convex";
    case OddsCurvatureClass::Affine: return "affine";
    case OddsCurvatureClass::Neither: return "neither";
  }
  return "neither";
}

OddsCurvature classify_odds(const MeetingFunction& mf,
                            std::span<const double> probe_grid) {
  if (probe_grid.size() < 16) {
    throw validation_error("bad_argument", "probe grid needs >= 16 points");
  }
  for (std::size_t i = 1; i < probe_grid.size(); ++i) {
    if (!(probe_grid[i] > probe_grid[i - 1]) || !(probe_grid[i - 1] > 0.0)) {
      throw validation_error("bad_argument",
                             "probe grid must be strictly increasing and positive");
    }
  }
  if (probe_grid.front() > 1e-3 * (1.0 + 1e-9) ||
      probe_grid.back() < 1e3 * (1.0 - 1e-9)) {
    throw validation_error("bad_argument", "probe grid must span [1e-3, 1e3]");
  }

  std::vector<double> odds(probe_grid.size());
  for (std::size_t i = 0; i < probe_grid.size(); ++i) {
    odds[i] = probe_grid[i] / mf.m(probe_grid[i]);
  }

  // Chord gap: amount by which the middle point lies below the chord of its
  // neighbours. Positive gap = locally convex.
  bool concave_ok = true;
  bool convex_ok = true;
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < probe_grid.size(); ++i) {
    const double h1 = probe_grid[i] - probe_grid[i - 1];
    const double h2 = probe_grid[i + 1] - probe_grid[i];
    const double chord = (odds[i - 1] * h2 + odds[i + 1] * h1) / (h1 + h2);
    const double gap = chord - odds[i];
    const double tol = 1e-9 * std::max({1.0, std::abs(odds[i - 1]),
                                        std::abs(odds[i]),
                                        std::abs(odds[i + 1])});
    if (gap > tol) concave_ok = false;
    if (gap < -tol) convex_ok = false;
    if (std::abs(gap) > std::abs(worst)) worst = gap;
  }

  OddsCurvatureClass numeric;
  if (concave_ok && convex_ok) {
    numeric = OddsCurvatureClass::Affine;
  } else if (concave_ok) {
    numeric = OddsCurvatureClass::Concave;
  } else if (convex_ok) {
    numeric = OddsCurvatureClass::Convex;
  } else {
    numeric = OddsCurvatureClass::Neither;
  }

  // Analytic rule for the parametric families. For CES the odds map is
  // (alpha^rho + (beta t)^rho)^{1/rho} / (alpha beta): concave for rho < 1,
  // exactly affine for rho = 1, convex for rho > 1. Urn-ball odds are convex.
  OddsCurvatureClass cls = numeric;
  if (mf.family() == MeetingFamily::Ces) {
    if (mf.rho() < 1.0) {
      cls = OddsCurvatureClass::Concave;
    } else if (mf.rho() > 1.0) {
      cls = OddsCurvatureClass::Convex;
    } else {
      cls = OddsCurvatureClass::Affine;
    }
  } else {
    cls = OddsCurvatureClass::Convex;
  }
  return OddsCurvature{cls, worst};
}

std::vector<double> default_odds_probe_grid() { return logspace(1e-3, 1e3, 49); }

}  // namespace segmarket
