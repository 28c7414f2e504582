#pragma once

#include <array>
#include <vector>

#include "fao/core.hpp"

namespace fao {

struct Feature {
  double x = 0.0, y = 0.0;  // host-image pixel coordinates
  double sigma = 0.0;       // absolute scale
  double theta = 0.0;       // dominant orientation, [0, 2*pi)
  std::array<float, 128> descriptor{};
};

struct FeatureMatch {
  int index1 = -1;       // into the query set
  int index2 = -1;       // into the reference set
  double distance = 0.0; // descriptor distance to the nearest neighbor
  double ratio = 0.0;    // nearest / second-nearest distance
};

/// Scale-invariant keypoint detection and description: DoG pyramid with
/// 3 scales per octave (sigma0 = 1.6), sub-pixel refinement, contrast and
/// edge rejection, 36-bin orientation assignment and a 4x4x8 gradient
/// descriptor. Keypoints whose description region leaves the image are
/// dropped. Requires min(width, height) >= 64.
std::vector<Feature> detect_and_describe(const Image& img);

/// Ratio-test matching: each feature of `a` is paired with its nearest
/// neighbor in `b` iff nearest/second-nearest descriptor distance < ratio.
std::vector<FeatureMatch> match_features(const std::vector<Feature>& a,
                                         const std::vector<Feature>& b,
                                         double ratio);

}  // namespace fao
