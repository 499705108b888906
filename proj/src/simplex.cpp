#include "segmarket/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "segmarket/numeric.hpp"

namespace segmarket {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
// The pooling LPs are heavily degenerate (many hinge rows bind at once), so
// the right-hand side is perturbed lexicographically; the perturbation is
// removed again when the solution is read out.
constexpr double kPerturb = 1e-9;

class Tableau {
 public:
  Tableau(const LinearProgram& lp) {
    n_ = lp.num_vars;
    n_le_ = lp.le_rows.size();
    n_eq_ = lp.eq_rows.size();
    m_ = n_le_ + n_eq_;
    cols_ = n_ + n_le_ + n_eq_ + 1;  // vars, slacks, artificials, rhs
    rows_.assign(m_ + 1, std::vector<double>(cols_, 0.0));
    basis_.resize(m_);
    perturb_.resize(m_);

    if (lp.objective.size() != n_) {
      throw validation_error("bad_argument", "objective size mismatch");
    }
    for (std::size_t i = 0; i < n_le_; ++i) {
      if (lp.le_rows[i].size() != n_) {
        throw validation_error("bad_argument", "inequality row size mismatch");
      }
      if (lp.le_rhs[i] < 0.0) {
        throw validation_error("bad_argument",
                               "inequality rhs must be nonnegative");
      }
      auto& row = rows_[i];
      std::copy(lp.le_rows[i].begin(), lp.le_rows[i].end(), row.begin());
      row[slack_col(i)] = 1.0;
      perturb_[i] = kPerturb * static_cast<double>(i + 1);
      row[cols_ - 1] = lp.le_rhs[i] + perturb_[i];
      basis_[i] = slack_col(i);
    }
    for (std::size_t i = 0; i < n_eq_; ++i) {
      if (lp.eq_rows[i].size() != n_) {
        throw validation_error("bad_argument", "equality row size mismatch");
      }
      auto& row = rows_[n_le_ + i];
      const double sign = lp.eq_rhs[i] < 0.0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < n_; ++j) row[j] = sign * lp.eq_rows[i][j];
      row[art_col(i)] = 1.0;
      perturb_[n_le_ + i] = kPerturb * static_cast<double>(n_le_ + i + 1);
      row[cols_ - 1] = sign * lp.eq_rhs[i] + perturb_[n_le_ + i];
      basis_[n_le_ + i] = art_col(i);
    }
  }

  std::size_t slack_col(std::size_t i) const { return n_ + i; }
  std::size_t art_col(std::size_t i) const { return n_ + n_le_ + i; }
  std::size_t unit_col(std::size_t row) const {
    return row < n_le_ ? slack_col(row) : art_col(row - n_le_);
  }
  bool is_artificial(std::size_t col) const {
    return col >= n_ + n_le_ && col < cols_ - 1;
  }

  // Phase 1: minimize the sum of artificials, i.e. maximize its negative.
  void load_phase1_objective() {
    auto& obj = rows_[m_];
    std::fill(obj.begin(), obj.end(), 0.0);
    for (std::size_t i = 0; i < n_eq_; ++i) {
      const auto& row = rows_[n_le_ + i];
      for (std::size_t j = 0; j < cols_; ++j) obj[j] -= row[j];
    }
    for (std::size_t i = 0; i < n_eq_; ++i) obj[art_col(i)] = 0.0;
    phase1_ = true;
  }

  void load_phase2_objective(const std::vector<double>& c) {
    auto& obj = rows_[m_];
    std::fill(obj.begin(), obj.end(), 0.0);
    for (std::size_t j = 0; j < n_; ++j) obj[j] = -c[j];
    // Price out the current basis.
    for (std::size_t i = 0; i < m_; ++i) {
      const double coef = obj[basis_[i]];
      if (coef != 0.0) {
        for (std::size_t j = 0; j < cols_; ++j) obj[j] -= coef * rows_[i][j];
      }
    }
    phase1_ = false;
  }

  SimplexSolution::Status iterate(int max_iter) {
    const int stall_limit = static_cast<int>(16 * (m_ + n_)) + 64;
    int stall = 0;
    double last_obj = objective_value();
    bool bland = false;
    for (int it = 0; it < max_iter; ++it) {
      const auto& obj = rows_[m_];
      std::size_t enter = cols_ - 1;
      double best = -kCostTol;
      for (std::size_t j = 0; j + 1 < cols_; ++j) {
        if (!phase1_ && is_artificial(j)) continue;
        if (obj[j] < best) {
          best = obj[j];
          enter = j;
          if (bland) break;  // Bland: first eligible index
        }
      }
      if (enter == cols_ - 1) return SimplexSolution::Status::Optimal;

      // Ratio test: minimal ratio, ties (within a tiny window) resolved by
      // the largest pivot magnitude for stability.
      std::size_t leave = m_;
      double best_ratio = std::numeric_limits<double>::infinity();
      double best_pivot = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = rows_[i][enter];
        if (a > kPivotTol) {
          const double ratio = rows_[i][cols_ - 1] / a;
          const double window = 1e-12 * (1.0 + std::abs(best_ratio));
          if (ratio < best_ratio - window ||
              (ratio < best_ratio + window && a > best_pivot)) {
            best_ratio = ratio;
            best_pivot = a;
            leave = i;
          }
        }
      }
      if (leave == m_) return SimplexSolution::Status::Unbounded;
      pivot(leave, enter);

      const double now = objective_value();
      if (now > last_obj + 1e-13 * (1.0 + std::abs(last_obj))) {
        stall = 0;
        last_obj = now;
      } else if (++stall > stall_limit) {
        bland = true;  // degeneracy guard
      }
    }
    return SimplexSolution::Status::IterationLimit;
  }

  void pivot(std::size_t r, std::size_t c) {
    auto& prow = rows_[r];
    const double p = prow[c];
    for (double& v : prow) v /= p;
    prow[c] = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = rows_[i][c];
      if (f == 0.0) continue;
      auto& row = rows_[i];
      for (std::size_t j = 0; j < cols_; ++j) row[j] -= f * prow[j];
      row[c] = 0.0;
    }
    basis_[r] = c;
  }

  double objective_value() const { return rows_[m_][cols_ - 1]; }

  // After phase 1, force artificials out of the basis where possible. A row
  // that stays artificial-basic is redundant and keeps value ~0.
  void expel_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (!is_artificial(basis_[i])) continue;
      for (std::size_t j = 0; j < n_ + n_le_; ++j) {
        if (std::abs(rows_[i][j]) > 1e-7) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  SimplexSolution extract(const LinearProgram& lp) const {
    SimplexSolution sol;
    // Basic values with the rhs perturbation removed: the unit columns of
    // the tableau hold the basis inverse.
    std::vector<double> xb(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      KahanSum v;
      v.add(rows_[i][cols_ - 1]);
      for (std::size_t r = 0; r < m_; ++r) {
        v.add(-perturb_[r] * rows_[i][unit_col(r)]);
      }
      xb[i] = v.value();
    }
    sol.x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) sol.x[basis_[i]] = std::max(0.0, xb[i]);
    }
    KahanSum obj;
    for (std::size_t j = 0; j < n_; ++j) obj.add(lp.objective[j] * sol.x[j]);
    sol.objective = obj.value();

    sol.dual_le.resize(n_le_);
    sol.dual_eq.resize(n_eq_);
    const auto& zrow = rows_[m_];
    for (std::size_t i = 0; i < n_le_; ++i) sol.dual_le[i] = zrow[slack_col(i)];
    for (std::size_t i = 0; i < n_eq_; ++i) {
      const double sign = lp.eq_rhs[i] < 0.0 ? -1.0 : 1.0;
      sol.dual_eq[i] = sign * zrow[art_col(i)];
    }
    KahanSum d;
    for (std::size_t i = 0; i < n_eq_; ++i) d.add(sol.dual_eq[i] * lp.eq_rhs[i]);
    for (std::size_t i = 0; i < n_le_; ++i) d.add(sol.dual_le[i] * lp.le_rhs[i]);
    sol.dual_objective = d.value();
    return sol;
  }

 private:
  std::size_t n_ = 0, n_le_ = 0, n_eq_ = 0, m_ = 0, cols_ = 0;
  std::vector<std::vector<double>> rows_;
  std::vector<double> perturb_;
  std::vector<std::size_t> basis_;
  bool phase1_ = false;
};

}  // namespace

SimplexSolution solve_simplex(const LinearProgram& lp, int max_iter) {
  Tableau tab(lp);

  tab.load_phase1_objective();
  auto status = tab.iterate(max_iter);
  if (status != SimplexSolution::Status::Optimal) {
    SimplexSolution sol;
    sol.status = status;
    return sol;
  }
  // Phase-1 leftovers on the order of the perturbation are feasible.
  if (std::abs(tab.objective_value()) > 1e-6) {
    SimplexSolution sol;
    sol.status = SimplexSolution::Status::Infeasible;
    return sol;
  }
  tab.expel_artificials();

  tab.load_phase2_objective(lp.objective);
  status = tab.iterate(max_iter);
  SimplexSolution sol = tab.extract(lp);
  sol.status = status;
  return sol;
}

}  // namespace segmarket
