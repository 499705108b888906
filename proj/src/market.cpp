#include "segmarket/market.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "segmarket/numeric.hpp"

namespace segmarket {

Prior Prior::uniform(int n) {
  if (n < 1) throw validation_error("bad_argument", "uniform prior needs n >= 1");
  Prior p;
  p.grid.resize(static_cast<std::size_t>(n));
  p.weights.assign(static_cast<std::size_t>(n), 1.0 / n);
  for (int j = 0; j < n; ++j) {
    p.grid[static_cast<std::size_t>(j)] = (j + 0.5) / n;
  }
  p.validate();
  return p;
}

Prior Prior::from_points(std::vector<double> grid, std::vector<double> weights) {
  Prior p;
  p.grid = std::move(grid);
  p.weights = std::move(weights);
  p.validate();
  return p;
}

void Prior::validate() const {
  if (grid.empty() || grid.size() != weights.size()) {
    throw validation_error("bad_argument", "prior grid/weights misaligned or empty");
  }
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (!(grid[j] >= 0.0) || !(grid[j] <= 1.0)) {
      throw validation_error("bad_argument", "prior types must lie in [0, 1]");
    }
    if (j > 0 && !(grid[j] > grid[j - 1])) {
      throw validation_error("bad_argument", "prior grid must be strictly increasing");
    }
    if (!(weights[j] > 0.0)) {
      throw validation_error("bad_argument", "prior weights must be strictly positive");
    }
  }
  const double total = kahan_total(weights);
  if (std::abs(total - 1.0) > 1e-12) {
    throw validation_error("bad_argument", "prior weights must sum to 1");
  }
}

double Prior::mean() const { return kahan_dot(grid, weights); }

double Prior::cdf(double x) const {
  KahanSum s;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (grid[j] <= x) s.add(weights[j]);
  }
  return s.value();
}

SurplusSplit SurplusSplit::constant(double ell) {
  if (!(ell > 0.0) || ell > 1.0) {
    throw validation_error("bad_argument", "constant split requires ell in (0, 1]");
  }
  SurplusSplit s;
  s.constant_ = ell;
  return s;
}

SurplusSplit SurplusSplit::table(std::vector<double> values) {
  if (values.empty()) {
    throw validation_error("bad_argument", "split table must be non-empty");
  }
  for (double v : values) {
    if (!(v >= 0.0) || v > 1.0) {
      throw validation_error("bad_argument", "split values must lie in [0, 1]");
    }
  }
  SurplusSplit s;
  s.values_ = std::move(values);
  return s;
}

double SurplusSplit::ell() const {
  if (!constant_) {
    throw validation_error("bad_argument", "split is not constant");
  }
  return *constant_;
}

double SurplusSplit::at(const Prior& prior, std::size_t j) const {
  if (j >= prior.size()) {
    throw validation_error("bad_argument", "split index out of range");
  }
  if (constant_) return *constant_;
  if (values_.size() != prior.size()) {
    throw validation_error("bad_argument", "split table does not match the prior grid");
  }
  return values_[j];
}

double SurplusSplit::mean_lambda_theta(const Prior& prior,
                                       std::span<const double> posterior) const {
  if (posterior.size() != prior.size()) {
    throw validation_error("bad_argument", "posterior does not match the prior grid");
  }
  KahanSum s;
  for (std::size_t j = 0; j < posterior.size(); ++j) {
    s.add(posterior[j] * at(prior, j) * prior.grid[j]);
  }
  return s.value();
}

void SurplusSplit::validate(const Prior& prior) const {
  if (!constant_ && values_.size() != prior.size()) {
    throw validation_error("bad_argument", "split table does not match the prior grid");
  }
}

void SurplusSplit::require_non_trivial(const Prior& prior) const {
  validate(prior);
  double mass_positive = 0.0;
  double max_surplus = 0.0;
  for (std::size_t j = 0; j < prior.size(); ++j) {
    const double lam = at(prior, j);
    if (lam > 0.0) mass_positive += prior.weights[j];
    max_surplus = std::max(max_surplus, lam * prior.grid[j]);
  }
  if (mass_positive <= 0.0 || max_surplus <= 0.0) {
    throw assumption_error(
        "non_triviality",
        "buyers capture no surplus from any seller type (non-triviality fails)");
  }
}

double Segmentation::posterior_mean(const Prior& prior, std::size_t s) const {
  return kahan_dot(submarkets.at(s).posterior, prior.grid);
}

std::vector<double> Segmentation::posterior_means(const Prior& prior) const {
  std::vector<double> out(size());
  for (std::size_t s = 0; s < size(); ++s) out[s] = posterior_mean(prior, s);
  return out;
}

std::vector<double> Segmentation::means_lambda_theta(
    const Prior& prior, const SurplusSplit& split) const {
  std::vector<double> out(size());
  for (std::size_t s = 0; s < size(); ++s) {
    out[s] = split.mean_lambda_theta(prior, submarkets[s].posterior);
  }
  return out;
}

void Segmentation::validate(const Prior& prior) const {
  if (submarkets.empty()) {
    throw validation_error("bad_argument", "segmentation has no submarkets");
  }
  KahanSum total;
  for (const auto& sub : submarkets) {
    if (!(sub.weight > 0.0)) {
      throw validation_error("bad_argument", "submarket weights must be positive");
    }
    total.add(sub.weight);
    if (sub.posterior.size() != prior.size()) {
      throw validation_error("bad_argument", "posterior does not match the prior grid");
    }
    KahanSum psum;
    for (double p : sub.posterior) {
      if (!(p >= 0.0)) {
        throw validation_error("bad_argument", "posterior entries must be nonnegative");
      }
      psum.add(p);
    }
    if (std::abs(psum.value() - 1.0) > 1e-12) {
      throw validation_error("bad_argument", "each posterior must sum to 1");
    }
  }
  if (std::abs(total.value() - 1.0) > 1e-12) {
    throw validation_error("bad_argument", "submarket weights must sum to 1");
  }
}

Segmentation perfect_segmentation(const Prior& prior) {
  prior.validate();
  Segmentation seg;
  seg.submarkets.resize(prior.size());
  for (std::size_t j = 0; j < prior.size(); ++j) {
    seg.submarkets[j].weight = prior.weights[j];
    seg.submarkets[j].posterior.assign(prior.size(), 0.0);
    seg.submarkets[j].posterior[j] = 1.0;
  }
  return seg;
}

Segmentation pooled_segmentation(const Prior& prior) {
  prior.validate();
  Segmentation seg;
  seg.submarkets.resize(1);
  seg.submarkets[0].weight = 1.0;
  seg.submarkets[0].posterior = prior.weights;
  return seg;
}

BinarySegmentation binary_segmentation(const Prior& prior, int cutoff_index,
                                       double split) {
  prior.validate();
  const auto n = static_cast<int>(prior.size());
  if (cutoff_index < 1 || cutoff_index > n) {
    throw validation_error("bad_argument", "cutoff_index out of range");
  }
  if (!(split >= 0.0) || split > 1.0) {
    throw validation_error("bad_argument", "split must lie in [0, 1]");
  }
  const auto ci = static_cast<std::size_t>(cutoff_index - 1);

  std::vector<double> low(prior.size(), 0.0), high(prior.size(), 0.0);
  for (std::size_t j = 0; j < prior.size(); ++j) {
    if (j < ci) {
      low[j] = prior.weights[j];
    } else if (j == ci) {
      low[j] = split * prior.weights[j];
      high[j] = (1.0 - split) * prior.weights[j];
    } else {
      high[j] = prior.weights[j];
    }
  }
  const double w_low = kahan_total(low);
  const double w_high = kahan_total(high);
  if (!(w_low > 0.0) || !(w_high > 0.0)) {
    throw validation_error("bad_argument",
                           "binary segmentation would produce an empty submarket");
  }
  BinarySegmentation out;
  out.low_weight = w_low;
  out.high_weight = w_high;
  Submarket lo_sub, hi_sub;
  lo_sub.weight = w_low;
  hi_sub.weight = w_high;
  lo_sub.posterior.resize(prior.size());
  hi_sub.posterior.resize(prior.size());
  for (std::size_t j = 0; j < prior.size(); ++j) {
    lo_sub.posterior[j] = low[j] / w_low;
    hi_sub.posterior[j] = high[j] / w_high;
  }
  out.segmentation.submarkets = {std::move(lo_sub), std::move(hi_sub)};
  out.low_mean = out.segmentation.posterior_mean(prior, 0);
  out.high_mean = out.segmentation.posterior_mean(prior, 1);
  return out;
}

Segmentation lower_censorship_segmentation(const Prior& prior, double cutoff) {
  prior.validate();
  Segmentation seg;
  Submarket pooled;
  pooled.posterior.assign(prior.size(), 0.0);
  double w_pool = 0.0;
  for (std::size_t j = 0; j < prior.size(); ++j) {
    if (prior.grid[j] <= cutoff) {
      pooled.posterior[j] = prior.weights[j];
      w_pool += prior.weights[j];
    }
  }
  if (w_pool > 0.0) {
    pooled.weight = w_pool;
    for (double& p : pooled.posterior) p /= w_pool;
    seg.submarkets.push_back(std::move(pooled));
  }
  for (std::size_t j = 0; j < prior.size(); ++j) {
    if (prior.grid[j] > cutoff) {
      Submarket sub;
      sub.weight = prior.weights[j];
      sub.posterior.assign(prior.size(), 0.0);
      sub.posterior[j] = 1.0;
      seg.submarkets.push_back(std::move(sub));
    }
  }
  return seg;
}

ConsistencyReport verify_consistency(const Prior& prior, const Segmentation& seg) {
  seg.validate(prior);
  double worst = 0.0;
  for (std::size_t j = 0; j < prior.size(); ++j) {
    KahanSum s;
    for (const auto& sub : seg.submarkets) {
      s.add(sub.weight * sub.posterior[j]);
    }
    worst = std::max(worst, std::abs(s.value() - prior.weights[j]));
  }
  return ConsistencyReport{worst <= 1e-10, worst};
}

double MeanDistribution::mean() const { return kahan_dot(points, masses); }

MeanDistribution posterior_mean_distribution(const Segmentation& seg,
                                             const Prior& prior) {
  std::vector<std::pair<double, double>> atoms(seg.size());
  for (std::size_t s = 0; s < seg.size(); ++s) {
    atoms[s] = {seg.posterior_mean(prior, s), seg.submarkets[s].weight};
  }
  std::sort(atoms.begin(), atoms.end());
  MeanDistribution out;
  for (const auto& [x, w] : atoms) {
    if (!out.points.empty() && x - out.points.back() <= 1e-12) {
      out.masses.back() += w;
    } else {
      out.points.push_back(x);
      out.masses.push_back(w);
    }
  }
  return out;
}

namespace {

// E[(x - X)^+] for an atomic distribution; exact hinge sum.
double hinge_moment(std::span<const double> points, std::span<const double> masses,
                    double x) {
  KahanSum s;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i] < x) s.add(masses[i] * (x - points[i]));
  }
  return s.value();
}

}  // namespace

MpcReport check_mpc(const MeanDistribution& candidate, const Prior& prior) {
  prior.validate();
  if (candidate.points.size() != candidate.masses.size() || candidate.points.empty()) {
    throw validation_error("bad_argument", "candidate points/masses misaligned");
  }
  KahanSum total;
  for (std::size_t i = 0; i < candidate.points.size(); ++i) {
    if (!(candidate.points[i] >= 0.0) || !(candidate.points[i] <= 1.0)) {
      throw validation_error("bad_argument", "candidate points must lie in [0, 1]");
    }
    if (!(candidate.masses[i] >= 0.0)) {
      throw validation_error("bad_argument", "candidate masses must be nonnegative");
    }
    total.add(candidate.masses[i]);
  }
  if (std::abs(total.value() - 1.0) > 1e-12) {
    throw validation_error("bad_argument", "candidate masses must sum to 1");
  }

  MpcReport report;
  report.mean_gap = std::abs(candidate.mean() - prior.mean());

  std::vector<double> breakpoints(candidate.points.begin(), candidate.points.end());
  breakpoints.insert(breakpoints.end(), prior.grid.begin(), prior.grid.end());
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()),
                    breakpoints.end());

  double worst = 0.0;
  for (double b : breakpoints) {
    const double lhs = hinge_moment(candidate.points, candidate.masses, b);
    const double rhs = hinge_moment(prior.grid, prior.weights, b);
    worst = std::max(worst, lhs - rhs);
  }
  report.worst_violation = worst;
  report.is_contraction = report.mean_gap <= 1e-10 && worst <= 1e-10;
  return report;
}

bool verify_mpc(const MeanDistribution& candidate, const Prior& prior) {
  return check_mpc(candidate, prior).is_contraction;
}

double feasibility_residual(const Segmentation& seg, const TightnessAllocation& tau,
                            double k) {
  if (tau.tightness.size() != seg.size()) {
    throw validation_error("bad_argument", "tightness does not match the segmentation");
  }
  KahanSum s;
  for (std::size_t i = 0; i < seg.size(); ++i) {
    s.add(seg.submarkets[i].weight * tau.tightness[i]);
  }
  return std::abs(k * s.value() - 1.0);
}

}  // namespace segmarket
