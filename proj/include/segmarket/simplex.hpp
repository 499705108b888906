#pragma once

#include <vector>

#include "segmarket/errors.hpp"

namespace segmarket {

/// maximize c.x  subject to  A_eq x = b_eq,  A_le x <= b_le,  x >= 0.
/// Dense row-major constraint data; right-hand sides of inequality rows must
/// be nonnegative (they are for every program this toolkit builds).
struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<double> objective;
  std::vector<std::vector<double>> eq_rows;
  std::vector<double> eq_rhs;
  std::vector<std::vector<double>> le_rows;
  std::vector<double> le_rhs;
};

struct SimplexSolution {
  enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };
  Status status = Status::IterationLimit;
  std::vector<double> x;
  double objective = 0.0;
  /// Duals: free for equality rows, nonnegative for inequality rows. The
  /// dual objective equals eq_rhs.dual_eq + le_rhs.dual_le at optimality.
  std::vector<double> dual_eq;
  std::vector<double> dual_le;
  double dual_objective = 0.0;
};

/// Two-phase dense tableau simplex with a Bland anti-cycling fallback.
/// Intended for the small programs the oracle builds (a few hundred rows).
SimplexSolution solve_simplex(const LinearProgram& lp, int max_iter = 200000);

}  // namespace segmarket
