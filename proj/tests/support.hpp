#pragma once

// Shared test fixtures: deterministic random instances and closed-form
// oracles that stay independent of the library's solution paths.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "segmarket/market.hpp"
#include "segmarket/meeting.hpp"

namespace segtest {

using Rng = std::mt19937_64;

constexpr std::uint64_t kSeed = 20260809ULL;

inline segmarket::Prior random_prior(Rng& rng, int min_n = 2, int max_n = 9) {
  std::uniform_int_distribution<int> size(min_n, max_n);
  const int n = size(rng);
  std::uniform_real_distribution<double> point(0.02, 0.98);
  std::vector<double> grid;
  while (static_cast<int>(grid.size()) < n) {
    const double x = point(rng);
    bool ok = true;
    for (double g : grid) ok = ok && std::abs(g - x) > 1e-3;
    if (ok) grid.push_back(x);
  }
  std::sort(grid.begin(), grid.end());

  std::exponential_distribution<double> mass(1.0);
  std::vector<double> weights(grid.size());
  double total = 0.0;
  for (double& w : weights) {
    w = mass(rng) + 0.05;
    total += w;
  }
  for (double& w : weights) w /= total;
  // Renormalize exactly.
  double s = 0.0;
  for (std::size_t j = 0; j + 1 < weights.size(); ++j) s += weights[j];
  weights.back() = 1.0 - s;
  return segmarket::Prior::from_points(std::move(grid), std::move(weights));
}

/// Random consistent segmentation via a random stochastic kernel: each type
/// spreads its mass over `submarkets` cells, so consistency holds by
/// construction.
inline segmarket::Segmentation random_segmentation(const segmarket::Prior& prior,
                                                   Rng& rng, int submarkets = 4) {
  std::exponential_distribution<double> cell(1.0);
  const std::size_t n = prior.size();
  const auto s_count = static_cast<std::size_t>(submarkets);
  std::vector<std::vector<double>> kernel(n, std::vector<double>(s_count));
  for (std::size_t j = 0; j < n; ++j) {
    double total = 0.0;
    for (double& v : kernel[j]) {
      v = cell(rng) + 1e-3;
      total += v;
    }
    for (double& v : kernel[j]) v /= total;
  }
  segmarket::Segmentation seg;
  for (std::size_t s = 0; s < s_count; ++s) {
    segmarket::Submarket sub;
    sub.posterior.assign(n, 0.0);
    double w = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      sub.posterior[j] = prior.weights[j] * kernel[j][s];
      w += sub.posterior[j];
    }
    if (w < 1e-12) continue;
    sub.weight = w;
    for (double& p : sub.posterior) p /= w;
    seg.submarkets.push_back(std::move(sub));
  }
  // Repair the tiny weight drift from normalization.
  double total = 0.0;
  for (const auto& sub : seg.submarkets) total += sub.weight;
  for (auto& sub : seg.submarkets) sub.weight /= total;
  return seg;
}

inline segmarket::MeetingFunction random_meeting(Rng& rng) {
  std::uniform_real_distribution<double> prob(0.3, 1.0);
  std::uniform_real_distribution<double> logrho(std::log(0.4), std::log(3.0));
  std::bernoulli_distribution urn(0.4);
  if (urn(rng)) {
    return segmarket::MeetingFunction::urn_ball(prob(rng), prob(rng));
  }
  return segmarket::MeetingFunction::ces(prob(rng), prob(rng),
                                         std::exp(logrho(rng)));
}

/// Continuum oracle for the perfect-segmentation planner multiplier with a
/// uniform prior and m(t) = t/(1+t): the unique root of
/// (2/3)(1 - eta^{3/2})/sqrt(eta) - (1 - eta) = 1.
inline double ces11_uniform_perfect_eta() {
  auto lhs = [](double eta) {
    return (2.0 / 3.0) * (1.0 - std::pow(eta, 1.5)) / std::sqrt(eta) -
           (1.0 - eta);
  };
  double lo = 1e-6, hi = 1.0 - 1e-9;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (lhs(mid) > 1.0) {
      lo = mid;  // lhs is decreasing in eta
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Continuum designed reservation value for the affine case (uniform prior,
/// m = t/(1+t), ell = 1): the root of (1-u)^2/(2u) = 1.
inline double ces11_uniform_u_bar() { return 2.0 - std::sqrt(3.0); }

/// Continuum LP value for the same primitives.
inline double ces11_uniform_lp_value(double u) {
  return (1.0 - u) * (1.0 - u) / (2.0 * u);
}

inline double central_difference(const std::function<double(double)>& f, double x,
                                 double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace segtest
