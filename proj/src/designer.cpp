#include "segmarket/designer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "segmarket/numeric.hpp"

namespace segmarket {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Suffix aggregates over the prior grid: weight and mean of {theta_l : l >= j}.
struct SuffixMeans {
  std::vector<double> weight;  // size n + 1, weight[n] = 0
  std::vector<double> moment;  // sum of w * theta over the suffix

  explicit SuffixMeans(const Prior& prior) {
    const std::size_t n = prior.size();
    weight.assign(n + 1, 0.0);
    moment.assign(n + 1, 0.0);
    for (std::size_t j = n; j-- > 0;) {
      weight[j] = weight[j + 1] + prior.weights[j];
      moment[j] = moment[j + 1] + prior.weights[j] * prior.grid[j];
    }
  }
  double mean(std::size_t j) const { return moment[j] / weight[j]; }
};

// Value at `theta` of the tangent to x -> g(ell x / u) drawn at x = xbar.
// Requires ell * xbar / u strictly above 1/beta.
double tangent_score(const MeetingFunction& mf, double ell, double u, double xbar,
                     double theta) {
  const double y = ell * xbar / u;
  return mf.g(y) + mf.g_prime(y) * (ell / u) * (theta - xbar);
}

bool tangency_defined(const MeetingFunction& mf, double ell, double u, double xbar) {
  return ell * xbar * mf.beta() > u * (1.0 + 1e-13);
}

// Where the pooling boundary sits for a given reservation value u: either
// everything is pooled, or the boundary atom `boundary` is split with
// fraction `split_low` of its mass joining the low cell.
struct CutoffSolution {
  bool pooled = false;
  std::size_t boundary = 0;
  double split_low = 1.0;
  double theta_c = 0.0;
  double high_weight = 0.0;
  double high_mean = 0.0;
};

// Scans the grid for the zero of the tangent score. The score is monotone
// along the scan (in the boundary atom's split fraction within an atom,
// affine in theta between atoms), so the first sign change pins the cell.
CutoffSolution solve_cutoff(const MeetingFunction& mf, const Prior& prior,
                            double ell, double u) {
  const std::size_t n = prior.size();
  const SuffixMeans sfx(prior);

  auto score_at = [&](double xbar, double theta) {
    return tangency_defined(mf, ell, u, xbar) ? tangent_score(mf, ell, u, xbar, theta)
                                              : kNegInf;
  };

  for (std::size_t j = 0; j < n; ++j) {
    const double d_in = score_at(sfx.mean(j), prior.grid[j]);
    if (d_in < 0.0) continue;

    if (j == 0) {
      CutoffSolution sol;
      sol.pooled = true;
      sol.theta_c = prior.grid.front();
      sol.split_low = 0.0;
      sol.high_weight = 1.0;
      sol.high_mean = sfx.mean(0);
      return sol;
    }

    const double xbar_next = sfx.mean(j);  // atoms >= j
    const double d_out_prev = score_at(xbar_next, prior.grid[j - 1]);
    if (d_out_prev >= 0.0) {
      // Zero sits inside atom j-1: bisect its split fraction. The score is
      // increasing in s because shifting mass of a low type out of the high
      // cell raises the high mean.
      const std::size_t b = j - 1;
      auto xbar_of = [&](double s) {
        const double w_hi = sfx.weight[b + 1] + (1.0 - s) * prior.weights[b];
        const double m_hi = sfx.moment[b + 1] +
                            (1.0 - s) * prior.weights[b] * prior.grid[b];
        return m_hi / w_hi;
      };
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (score_at(xbar_of(mid), prior.grid[b]) < 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      const double s = 0.5 * (lo + hi);
      CutoffSolution sol;
      sol.boundary = b;
      sol.split_low = s;
      sol.theta_c = prior.grid[b];
      sol.high_weight = sfx.weight[b + 1] + (1.0 - s) * prior.weights[b];
      sol.high_mean = xbar_of(s);
      return sol;
    }

    // Zero lies strictly between atoms j-1 and j; the tangent score is
    // affine in theta there, so solve it directly.
    const double y = ell * xbar_next / u;
    double theta_c = xbar_next - mf.g(y) * u / (ell * mf.g_prime(y));
    CutoffSolution sol;
    sol.high_weight = sfx.weight[j];
    sol.high_mean = xbar_next;
    if (theta_c >= prior.grid[j] - 1e-12) {
      sol.boundary = j;
      sol.split_low = 0.0;
      sol.theta_c = prior.grid[j];
    } else {
      sol.boundary = j - 1;
      sol.split_low = 1.0;
      sol.theta_c = std::max(theta_c, prior.grid[j - 1]);
    }
    return sol;
  }
  throw solver_error("no_cutoff", "no pooling cutoff exists for this u");
}

double feasibility_value(const MeetingFunction& mf, double ell, double u, double k,
                         const CutoffSolution& sol) {
  return k * sol.high_weight * mf.g(ell * sol.high_mean / u);
}

Segmentation realize(const Prior& prior, const CutoffSolution& sol) {
  if (sol.pooled) return pooled_segmentation(prior);
  return binary_segmentation(prior, static_cast<int>(sol.boundary) + 1,
                             sol.split_low)
      .segmentation;
}

struct ConvexDesign {
  double u_bar = 0.0;
  CutoffSolution cutoff;
};

ConvexDesign solve_convex(const MeetingFunction& mf, const Prior& prior, double k,
                          double ell) {
  const double u_hi = mf.beta() * ell * prior.grid.back();
  auto value = [&](double u) {
    return feasibility_value(mf, ell, u, k, solve_cutoff(mf, prior, ell, u));
  };
  BisectOptions opt;
  opt.value_tol = 1e-10;
  opt.max_iter = 400;
  const double u_bar =
      bisect_monotone(value, 0.0, u_hi, 1.0, /*increasing=*/false, opt);
  if (std::abs(value(u_bar) - 1.0) > 1e-10) {
    throw solver_error("no_convergence", "designed reservation value did not converge");
  }
  return ConvexDesign{u_bar, solve_cutoff(mf, prior, ell, u_bar)};
}

}  // namespace

std::pair<double, double> conditional_means(const Prior& prior, double theta) {
  prior.validate();
  if (!(theta >= prior.grid.front()) || !(theta <= prior.grid.back())) {
    throw validation_error("bad_argument", "theta outside the grid range");
  }
  KahanSum w_lo, m_lo, w_hi, m_hi;
  for (std::size_t j = 0; j < prior.size(); ++j) {
    if (prior.grid[j] <= theta) {
      w_lo.add(prior.weights[j]);
      m_lo.add(prior.weights[j] * prior.grid[j]);
    }
    if (prior.grid[j] >= theta) {
      w_hi.add(prior.weights[j]);
      m_hi.add(prior.weights[j] * prior.grid[j]);
    }
  }
  return {m_lo.value() / w_lo.value(), m_hi.value() / w_hi.value()};
}

double g_u(const MeetingFunction& mf, const Prior& prior, double ell, double u,
           double theta) {
  if (!(ell > 0.0) || ell > 1.0) {
    throw validation_error("bad_argument", "ell must lie in (0, 1]");
  }
  if (!(u > 0.0) || !(u < mf.beta() * ell)) {
    throw validation_error("bad_argument", "u must lie in (0, beta * ell)");
  }
  const double x_hi = conditional_means(prior, theta).second;
  if (!tangency_defined(mf, ell, u, x_hi)) {
    throw validation_error("bad_argument",
                           "theta is below the admissible cutoff range for this u");
  }
  return tangent_score(mf, ell, u, x_hi, theta);
}

double find_cutoff(const MeetingFunction& mf, const Prior& prior, double ell,
                   double u) {
  if (!(ell > 0.0) || ell > 1.0) {
    throw validation_error("bad_argument", "ell must lie in (0, 1]");
  }
  if (!(u > 0.0) || !(u < mf.beta() * ell)) {
    throw validation_error("bad_argument", "u must lie in (0, beta * ell)");
  }
  prior.validate();
  const double target = u / (mf.beta() * ell);
  if (!(prior.grid.back() > target)) {
    throw validation_error("bad_argument",
                           "no type is attractive enough at this u");
  }
  auto score = [&](double theta) {
    const double x_hi = conditional_means(prior, theta).second;
    return tangency_defined(mf, ell, u, x_hi)
               ? tangent_score(mf, ell, u, x_hi, theta)
               : kNegInf;
  };
  double lo = prior.grid.front();
  double hi = prior.grid.back();
  if (score(lo) >= 0.0) return lo;
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (score(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
  }
  return 0.5 * (lo + hi);
}

PriceCertificate certify(const MeetingFunction& mf, const Prior& prior, double ell,
                         double u, double theta_c, double boundary_split_low) {
  if (!(ell > 0.0) || ell > 1.0) {
    throw validation_error("bad_argument", "ell must lie in (0, 1]");
  }
  if (!(u > 0.0) || !(u < mf.beta() * ell)) {
    throw validation_error("bad_argument", "u must lie in (0, beta * ell)");
  }
  if (!(boundary_split_low >= 0.0) || boundary_split_low > 1.0) {
    throw validation_error("bad_argument", "boundary split must lie in [0, 1]");
  }
  prior.validate();

  // Low/high cells around the kink; an atom within 1e-12 of theta_c is
  // divided according to boundary_split_low.
  KahanSum w_lo, m_lo, w_hi, m_hi;
  for (std::size_t j = 0; j < prior.size(); ++j) {
    const double th = prior.grid[j];
    const double w = prior.weights[j];
    if (std::abs(th - theta_c) <= 1e-12) {
      w_lo.add(boundary_split_low * w);
      m_lo.add(boundary_split_low * w * th);
      w_hi.add((1.0 - boundary_split_low) * w);
      m_hi.add((1.0 - boundary_split_low) * w * th);
    } else if (th < theta_c) {
      w_lo.add(w);
      m_lo.add(w * th);
    } else {
      w_hi.add(w);
      m_hi.add(w * th);
    }
  }
  const double high_weight = w_hi.value();
  const double low_weight = w_lo.value();
  if (!(high_weight > 0.0)) {
    throw validation_error("bad_argument", "no prior mass above theta_c");
  }
  const double x_bar = m_hi.value() / high_weight;
  if (!tangency_defined(mf, ell, u, x_bar)) {
    throw validation_error("bad_argument",
                           "upper cell mean is too low for a tangent at this u");
  }

  PriceCertificate cert;
  cert.theta_c = theta_c;
  cert.boundary_split = boundary_split_low;
  cert.tangency_point = x_bar;
  const double y = ell * x_bar / u;
  cert.intercept = mf.g(y);
  cert.slope = mf.g_prime(y) * ell / u;

  auto price = [&](double x) {
    return x < theta_c ? 0.0 : cert.intercept + cert.slope * (x - x_bar);
  };
  auto payoff = [&](double x) {
    return mf.beta() * ell * x > u ? mf.g(ell * x / u) : 0.0;
  };

  // (a) The price function must envelope the payoff over the prior's hull.
  std::vector<double> probe = linspace(prior.grid.front(), prior.grid.back(), 1000);
  for (double x : {theta_c, u / (mf.beta() * ell), x_bar}) {
    if (x >= prior.grid.front() && x <= prior.grid.back()) probe.push_back(x);
  }
  double worst = 0.0;
  for (double x : probe) {
    worst = std::max(worst, payoff(x) - price(x));
  }
  cert.worst_envelope_violation = worst;
  cert.envelope_ok = worst <= 1e-9;

  // (b) Contact on the support of the pooled-mean distribution.
  double support_gap = std::abs(price(x_bar) - payoff(x_bar));
  if (low_weight > 0.0) {
    const double x_low = m_lo.value() / low_weight;
    support_gap = std::max(support_gap, std::abs(price(x_low) - payoff(x_low)));
  }
  cert.worst_support_gap = support_gap;
  cert.support_ok = support_gap <= 1e-9;

  // (c) Equal expected price under the binary distribution and the prior.
  KahanSum ef;
  for (std::size_t j = 0; j < prior.size(); ++j) {
    ef.add(prior.weights[j] * price(prior.grid[j]));
  }
  double eh = high_weight * price(x_bar);
  if (low_weight > 0.0) {
    eh += low_weight * price(m_lo.value() / low_weight);
  }
  cert.mean_residual = std::abs(ef.value() - eh);
  cert.mean_ok = cert.mean_residual <= 1e-10;

  if (!cert.all_ok()) {
    throw solver_error(
        "certificate_failed",
        "price certificate failed: envelope " +
            std::to_string(cert.worst_envelope_violation) + ", support " +
            std::to_string(cert.worst_support_gap) + ", mean " +
            std::to_string(cert.mean_residual));
  }
  return cert;
}

DesignOutcome design(const Prior& prior, const MeetingFunction& mf, double k,
                     double ell) {
  if (!(ell > 0.0) || ell > 1.0) {
    throw validation_error("bad_argument", "ell must lie in (0, 1]");
  }
  if (!(k > 0.0)) throw validation_error("bad_argument", "k must be positive");
  prior.validate();
  const SurplusSplit split = SurplusSplit::constant(ell);

  const auto probe = default_odds_probe_grid();
  const OddsCurvature curv = classify_odds(mf, probe);

  DesignOutcome out;
  out.curvature = curv.cls;

  switch (curv.cls) {
    case OddsCurvatureClass::Concave: {
      out.segmentation = perfect_segmentation(prior);
      out.equilibrium = solve_equilibrium(prior, out.segmentation, mf, k, split);
      out.u_bar = out.equilibrium.u_star;
      out.total_surplus = out.equilibrium.total_surplus;
      return out;
    }
    case OddsCurvatureClass::Convex: {
      const ConvexDesign cd = solve_convex(mf, prior, k, ell);
      out.u_bar = cd.u_bar;
      out.cutoff_type = cd.cutoff.theta_c;
      out.boundary_split = cd.cutoff.split_low;
      out.segmentation = realize(prior, cd.cutoff);
      out.equilibrium = solve_equilibrium(prior, out.segmentation, mf, k, split);
      out.total_surplus = out.equilibrium.total_surplus;
      out.certificate =
          certify(mf, prior, ell, cd.u_bar, cd.cutoff.theta_c, cd.cutoff.split_low);
      return out;
    }
    case OddsCurvatureClass::Affine: {
      // Both constructions are optimal; return the perfect segmentation and
      // record the binary alternative, whose surplus must tie.
      out.segmentation = perfect_segmentation(prior);
      out.equilibrium = solve_equilibrium(prior, out.segmentation, mf, k, split);
      out.u_bar = out.equilibrium.u_star;
      out.total_surplus = out.equilibrium.total_surplus;
      const ConvexDesign cd = solve_convex(mf, prior, k, ell);
      out.cutoff_type = cd.cutoff.theta_c;
      out.boundary_split = cd.cutoff.split_low;
      const Segmentation binary = realize(prior, cd.cutoff);
      const EquilibriumOutcome eq_b = solve_equilibrium(prior, binary, mf, k, split);
      out.binary_alt_surplus = eq_b.total_surplus;
      out.certificate =
          certify(mf, prior, ell, cd.u_bar, cd.cutoff.theta_c, cd.cutoff.split_low);
      return out;
    }
    case OddsCurvatureClass::Neither:
      break;
  }
  throw solver_error("unsupported_curvature",
                     "odds map is neither concave nor convex; use the LP oracle");
}

}  // namespace segmarket
