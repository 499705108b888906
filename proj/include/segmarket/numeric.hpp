#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "segmarket/errors.hpp"

namespace segmarket {

/// Neumaier-compensated accumulator. Submarket sums must be independent of
/// evaluation order to ~1e-12, which plain left-to-right addition does not
/// guarantee on long grids.
class KahanSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double kahan_total(std::span<const double> xs) {
  KahanSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

inline double kahan_dot(std::span<const double> a, std::span<const double> b) {
  KahanSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
  return s.value();
}

struct BisectOptions {
  double value_tol = 0.0;   // stop when |f(mid) - target| <= value_tol (0: ignore)
  double x_rel_tol = 1e-13; // stop when bracket width <= x_rel_tol * max(|mid|, x_abs_floor)
  double x_abs_floor = 1e-300;
  int max_iter = 400;
};

/// Bisection for f(x) = target on [lo, hi] where f is monotone. `increasing`
/// states the direction; the endpoints themselves are never evaluated, the
/// caller vouches that the root is bracketed.
inline double bisect_monotone(const std::function<double(double)>& f, double lo,
                              double hi, double target, bool increasing,
                              const BisectOptions& opt = {}) {
  double mid = 0.5 * (lo + hi);
  for (int i = 0; i < opt.max_iter; ++i) {
    mid = 0.5 * (lo + hi);
    const double v = f(mid);
    if (opt.value_tol > 0.0 && std::abs(v - target) <= opt.value_tol) return mid;
    const bool go_right = increasing ? (v < target) : (v > target);
    if (go_right) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= opt.x_rel_tol * std::max(std::abs(mid), opt.x_abs_floor)) {
      break;
    }
  }
  return 0.5 * (lo + hi);
}

/// n log-spaced points on [a, b], a > 0.
inline std::vector<double> logspace(double a, double b, int n) {
  if (!(a > 0.0) || !(b > a) || n < 2) {
    throw validation_error("bad_argument", "logspace requires 0 < a < b, n >= 2");
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  const double la = std::log(a), lb = std::log(b);
  for (int i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        std::exp(la + (lb - la) * static_cast<double>(i) / (n - 1));
  }
  out.front() = a;
  out.back() = b;
  return out;
}

inline std::vector<double> linspace(double a, double b, int n) {
  if (n < 1) throw validation_error("bad_argument", "linspace requires n >= 1");
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = a;
    return out;
  }
  for (int i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        a + (b - a) * static_cast<double>(i) / (n - 1);
  }
  out.back() = b;
  return out;
}

}  // namespace segmarket
