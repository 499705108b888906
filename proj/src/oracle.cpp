#include "segmarket/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "segmarket/numeric.hpp"
#include "segmarket/planner.hpp"
#include "segmarket/simplex.hpp"

namespace segmarket {

namespace {

std::vector<double> refined_points(const Prior& prior, int mesh) {
  std::vector<double> pts = linspace(0.0, 1.0, mesh);
  pts.insert(pts.end(), prior.grid.begin(), prior.grid.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](double a, double b) { return std::abs(a - b) <= 1e-15; }),
            pts.end());
  return pts;
}

double hinge(const std::vector<double>& points, const std::vector<double>& masses,
             double b) {
  KahanSum s;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i] < b) s.add(masses[i] * (b - points[i]));
  }
  return s.value();
}

}  // namespace

LpSolution lp_value(const MeetingFunction& mf, const Prior& prior, double ell,
                    double u, int mesh, double k) {
  prior.validate();
  if (!(ell > 0.0) || ell > 1.0) {
    throw validation_error("bad_argument", "ell must lie in (0, 1]");
  }
  if (!(u > 0.0) || !(u < mf.beta() * ell)) {
    throw validation_error("bad_argument", "u must lie in (0, beta * ell)");
  }
  if (mesh < static_cast<int>(prior.size())) {
    throw validation_error("bad_argument", "mesh must be at least the grid size");
  }
  if (!(k > 0.0)) throw validation_error("bad_argument", "k must be positive");

  const std::vector<double> pts = refined_points(prior, mesh);
  const std::size_t n = pts.size();

  LinearProgram lp;
  lp.num_vars = n;
  lp.objective.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    lp.objective[j] =
        mf.beta() * ell * pts[j] > u ? k * mf.g(ell * pts[j] / u) : 0.0;
  }
  lp.eq_rows.push_back(std::vector<double>(n, 1.0));
  lp.eq_rhs.push_back(1.0);
  lp.eq_rows.push_back(pts);
  lp.eq_rhs.push_back(prior.mean());

  // One hinge row per breakpoint: E_H[(b - X)^+] <= E_F[(b - theta)^+].
  // Together with the mean row this is exactly the convex-order constraint,
  // including zero mass outside the prior's hull.
  for (double b : pts) {
    std::vector<double> row(n, 0.0);
    bool nonzero = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (pts[j] < b) {
        row[j] = b - pts[j];
        nonzero = true;
      }
    }
    if (!nonzero) continue;
    lp.le_rows.push_back(std::move(row));
    lp.le_rhs.push_back(hinge(prior.grid, prior.weights, b));
  }

  const SimplexSolution sol = solve_simplex(lp);
  if (sol.status != SimplexSolution::Status::Optimal) {
    throw solver_error("lp_failed", "pooling LP did not reach optimality");
  }

  LpSolution out;
  out.u = u;
  out.value = sol.objective;
  out.points = pts;
  out.masses = sol.x;
  out.duality_gap = std::abs(sol.objective - sol.dual_objective);
  for (std::size_t j = 0; j < n; ++j) {
    if (sol.x[j] > 1e-9) out.support.push_back(j);
  }
  return out;
}

double find_u_bar(const MeetingFunction& mf, const Prior& prior, double ell,
                  int mesh, double k) {
  auto value = [&](double u) { return lp_value(mf, prior, ell, u, mesh, k).value; };
  BisectOptions opt;
  opt.value_tol = 1e-8;
  opt.max_iter = 200;
  const double hi = mf.beta() * ell;
  const double u_bar = bisect_monotone(value, 0.0, hi, 1.0, /*increasing=*/false, opt);
  if (std::abs(value(u_bar) - 1.0) > 1e-8) {
    throw solver_error("no_convergence", "LP feasibility root did not converge");
  }
  return u_bar;
}

namespace {

Segmentation from_blocks(const Prior& prior,
                         const std::vector<std::vector<std::size_t>>& blocks) {
  Segmentation seg;
  for (const auto& block : blocks) {
    Submarket sub;
    sub.posterior.assign(prior.size(), 0.0);
    double w = 0.0;
    for (std::size_t j : block) {
      sub.posterior[j] = prior.weights[j];
      w += prior.weights[j];
    }
    sub.weight = w;
    for (double& p : sub.posterior) p /= w;
    seg.submarkets.push_back(std::move(sub));
  }
  return seg;
}

using PartitionVisitor =
    std::function<void(const std::vector<std::vector<std::size_t>>&)>;

// Interval partitions: each of the n-1 gaps is either a cut or not.
void visit_interval_partitions(std::size_t n, const PartitionVisitor& visit) {
  const std::size_t count = std::size_t{1} << (n - 1);
  for (std::size_t mask = 0; mask < count; ++mask) {
    std::vector<std::vector<std::size_t>> blocks(1);
    for (std::size_t j = 0; j < n; ++j) {
      blocks.back().push_back(j);
      if (j + 1 < n && (mask >> j) & 1) blocks.emplace_back();
    }
    visit(blocks);
  }
}

// All set partitions, streamed in restricted-growth-string order.
void visit_set_partitions(std::size_t n, const PartitionVisitor& visit) {
  std::vector<std::size_t> rgs(n, 0);
  while (true) {
    const std::size_t k = *std::max_element(rgs.begin(), rgs.end()) + 1;
    std::vector<std::vector<std::size_t>> blocks(k);
    for (std::size_t j = 0; j < n; ++j) blocks[rgs[j]].push_back(j);
    visit(blocks);

    std::size_t i = n - 1;
    for (; i >= 1; --i) {
      const std::size_t prefix_max =
          *std::max_element(rgs.begin(), rgs.begin() + static_cast<std::ptrdiff_t>(i));
      if (rgs[i] <= prefix_max) {
        ++rgs[i];
        std::fill(rgs.begin() + static_cast<std::ptrdiff_t>(i) + 1, rgs.end(), 0);
        break;
      }
    }
    if (i == 0) return;
  }
}

}  // namespace

BpResult enumerate_bp(const Prior& prior, const MeetingFunction& mf, double k,
                      const SurplusSplit& split, bool exhaustive, int max_n) {
  prior.validate();
  if (max_n > 12) max_n = 12;
  if (static_cast<int>(prior.size()) > max_n) {
    throw validation_error("bad_argument",
                           "grid too large for exhaustive enumeration");
  }
  split.require_non_trivial(prior);

  BpResult best;
  bool have = false;
  auto consider = [&](const std::vector<std::vector<std::size_t>>& blocks) {
    const Segmentation seg = from_blocks(prior, blocks);
    const EquilibriumOutcome eq = solve_equilibrium(prior, seg, mf, k, split);
    ++best.candidates_evaluated;
    if (!have || eq.total_surplus > best.total_surplus) {
      have = true;
      best.segmentation = seg;
      best.blocks = blocks;
      best.u_star = eq.u_star;
      best.total_surplus = eq.total_surplus;
    }
  };
  if (exhaustive) {
    visit_set_partitions(prior.size(), consider);
  } else {
    visit_interval_partitions(prior.size(), consider);
  }
  return best;
}

}  // namespace segmarket
