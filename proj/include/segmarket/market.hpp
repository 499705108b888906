#pragma once

#include <optional>
#include <span>
#include <vector>

#include "segmarket/errors.hpp"

namespace segmarket {

/// Finite distribution of seller types on [0, 1]: a strictly increasing grid
/// with strictly positive weights summing to one.
struct Prior {
  std::vector<double> grid;
  std::vector<double> weights;

  /// Midpoint grid theta_j = (j - 0.5)/n with equal weights 1/n.
  static Prior uniform(int n);
  static Prior from_points(std::vector<double> grid, std::vector<double> weights);

  std::size_t size() const noexcept { return grid.size(); }
  double mean() const;
  /// Right-continuous CDF F(x) = P(theta <= x).
  double cdf(double x) const;
  void validate() const;
};

/// Surplus-splitting rule lambda(theta): the buyer's share of the match
/// surplus, either a constant ell or a table aligned to a prior grid. The
/// implied price is p(theta) = (1 - lambda(theta)) * theta.
class SurplusSplit {
 public:
  static SurplusSplit constant(double ell);
  static SurplusSplit table(std::vector<double> values);

  bool is_constant() const noexcept { return constant_.has_value(); }
  /// The constant share; throws for table splits.
  double ell() const;
  /// lambda(theta_j) for grid index j.
  double at(const Prior& prior, std::size_t j) const;
  /// lambda * theta averaged under a posterior over the prior grid.
  double mean_lambda_theta(const Prior& prior,
                           std::span<const double> posterior) const;

  /// Table/grid alignment and range checks (values in [0, 1]).
  void validate(const Prior& prior) const;
  /// Non-triviality: positive prior mass of types with lambda(theta) > 0 and
  /// a positive buyer surplus somewhere; throws assumption_error otherwise.
  void require_non_trivial(const Prior& prior) const;

 private:
  SurplusSplit() = default;
  std::optional<double> constant_;
  std::vector<double> values_;
};

struct Submarket {
  double weight = 0.0;                // share of sellers in this submarket
  std::vector<double> posterior;      // distribution over the prior grid
};

/// A finite market segmentation: weighted submarkets whose posteriors must
/// average back to the prior (Bayes consistency).
struct Segmentation {
  std::vector<Submarket> submarkets;

  std::size_t size() const noexcept { return submarkets.size(); }
  double posterior_mean(const Prior& prior, std::size_t s) const;
  std::vector<double> posterior_means(const Prior& prior) const;
  std::vector<double> means_lambda_theta(const Prior& prior,
                                         const SurplusSplit& split) const;
  void validate(const Prior& prior) const;
};

/// One submarket per grid point (full revelation).
Segmentation perfect_segmentation(const Prior& prior);

/// A single submarket carrying the prior itself (no information).
Segmentation pooled_segmentation(const Prior& prior);

struct BinarySegmentation {
  Segmentation segmentation;
  double low_mean = 0.0;
  double high_mean = 0.0;
  double low_weight = 0.0;
  double high_weight = 0.0;
};

/// Two submarkets split at grid position `cutoff_index` (1-based). The
/// boundary type's mass is divided: `split` of it joins the low submarket,
/// the rest the high one. Throws if either side ends up empty.
BinarySegmentation binary_segmentation(const Prior& prior, int cutoff_index,
                                       double split = 1.0);

/// Pools all types at or below `cutoff` into one submarket and keeps every
/// type above it in its own submarket.
Segmentation lower_censorship_segmentation(const Prior& prior, double cutoff);

struct ConsistencyReport {
  bool consistent = false;
  double max_residual = 0.0;
};

/// Checks the Bayes-consistency identity sum_s w_s * posterior_s = prior
/// weights, componentwise within 1e-10.
ConsistencyReport verify_consistency(const Prior& prior, const Segmentation& seg);

/// A distribution over posterior means: support points with masses.
struct MeanDistribution {
  std::vector<double> points;
  std::vector<double> masses;

  double mean() const;
};

/// Posterior-mean distribution of a segmentation; submarkets with coincident
/// means (within 1e-12) are merged.
MeanDistribution posterior_mean_distribution(const Segmentation& seg,
                                             const Prior& prior);

struct MpcReport {
  bool is_contraction = false;
  double mean_gap = 0.0;            // |E_H - E_F|
  double worst_violation = 0.0;     // max excess of the H hinge over the F hinge
};

/// Tests whether `candidate` is a mean-preserving contraction of the prior:
/// equal means within 1e-10 and, at every breakpoint x, the hinge moment
/// E_H[(x - X)^+] does not exceed E_F[(x - theta)^+] by more than 1e-10.
/// Hinge sums are exact for atomic distributions, so no quadrature enters.
MpcReport check_mpc(const MeanDistribution& candidate, const Prior& prior);
bool verify_mpc(const MeanDistribution& candidate, const Prior& prior);

/// Buyer-to-seller tightness per submarket, aligned to a segmentation.
struct TightnessAllocation {
  std::vector<double> tightness;
};

/// |k * sum_s w_s * tau_s - 1|, the feasibility residual of the buyer mass
/// constraint.
double feasibility_residual(const Segmentation& seg,
                            const TightnessAllocation& tau, double k);

}  // namespace segmarket
