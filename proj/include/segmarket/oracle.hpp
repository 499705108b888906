#pragma once

#include <vector>

#include "segmarket/equilibrium.hpp"
#include "segmarket/market.hpp"
#include "segmarket/meeting.hpp"

namespace segmarket {

/// Solution of the mean-constrained pooling LP at a reservation value u:
/// the optimizing pooled-mean distribution over the refined point set and
/// its value k * sum phi(x_j, u) h_j.
struct LpSolution {
  double u = 0.0;
  double value = 0.0;
  std::vector<double> points;
  std::vector<double> masses;
  std::vector<std::size_t> support;  // indices with positive mass
  double duality_gap = 0.0;
};

/// Maximizes k * sum_j phi(x_j, u) h_j over distributions h on the prior
/// grid refined with `mesh` equally spaced points in [0, 1], subject to the
/// prior's mean and to one hinge-moment row per breakpoint (the exact
/// rendering of the mean-preserving-contraction constraint for atomic
/// distributions). Brute-force verifier for the designer.
LpSolution lp_value(const MeetingFunction& mf, const Prior& prior, double ell,
                    double u, int mesh, double k = 1.0);

/// The unique u with lp_value(u) = 1, by bisection. This is the designed
/// reservation value: no feasible segmentation can deliver buyers more.
double find_u_bar(const MeetingFunction& mf, const Prior& prior, double ell,
                  int mesh, double k = 1.0);

/// Result of exhaustive segmentation search on small grids.
struct BpResult {
  Segmentation segmentation;
  std::vector<std::vector<std::size_t>> blocks;  // grid indices per submarket
  double u_star = 0.0;
  double total_surplus = 0.0;
  std::size_t candidates_evaluated = 0;
};

/// Enumerates partitional segmentations of the grid (contiguous interval
/// blocks by default, every set partition with exhaustive = true), solves
/// the search equilibrium of each, and returns the surplus maximizer. Ties
/// go to the earliest partition in lexicographic encoding order. Grid size
/// is capped at 12.
BpResult enumerate_bp(const Prior& prior, const MeetingFunction& mf, double k,
                      const SurplusSplit& split, bool exhaustive = false,
                      int max_n = 12);

}  // namespace segmarket
