#pragma once

#include <cstdint>
#include <vector>

#include "fao/core.hpp"
#include "fao/features.hpp"

namespace fao {

struct PointMatch {
  Point p1, p2;
};

/// Pull coordinate pairs out of descriptor matches.
std::vector<PointMatch> to_point_matches(const std::vector<Feature>& a,
                                         const std::vector<Feature>& b,
                                         const std::vector<FeatureMatch>& matches);

/// Closed-form least squares for the six affine coefficients minimizing
/// sum ||H*p1 - p2||^2. Needs >= 3 non-collinear source points.
AffineTransform estimate_affine_lsq(const std::vector<PointMatch>& pairs);

struct RansacConfig {
  int max_iterations = 2000;
  double inlier_threshold = 2.0;  // reprojection tolerance, px
  int min_inliers = 8;
  uint64_t seed = 0;
};

struct RansacResult {
  AffineTransform transform;      // refit on the best consensus set
  std::vector<bool> inliers;      // under the refit transform
  int inlier_count = 0;
  AffineTransform hypothesis;     // best 3-point model, kept for diagnostics
  std::vector<bool> consensus;    // inliers of the hypothesis
  int best_iteration = -1;
};

/// Hypothesize-and-verify affine estimation; the final model is refit by
/// least squares on the best consensus set.
RansacResult ransac_affine(const std::vector<PointMatch>& matches,
                           const RansacConfig& cfg);

}  // namespace fao
