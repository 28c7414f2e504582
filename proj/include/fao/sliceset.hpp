#pragma once

#include <cstdint>
#include <vector>

#include "fao/core.hpp"
#include "fao/initializer.hpp"

namespace fao {

/// Two related slices cut around a matched keypoint pair, one per image.
struct SlicePair {
  Rect rect1, rect2;
  int index = 0;      // shared index within the selected set
  int match_id = -1;  // candidate/match the pair came from
};

struct SliceSet {
  std::vector<SlicePair> pairs;
  double proportion = 0.0;  // cached coverage ratio of the selection
};

/// One candidate per inlier match: a slice_size square centered on each
/// keypoint, clipped to image bounds; pairs whose clipped rect drops below
/// half the nominal side in either dimension are discarded.
std::vector<SlicePair> build_candidates(const std::vector<PointMatch>& matches,
                                        const std::vector<bool>& inliers,
                                        const Image& i1, const Image& i2,
                                        int slice_size = 256);

/// Exact intersection area in px^2.
long long overlap_area(const Rect& a, const Rect& b);

/// Exact area of the union of axis-aligned rectangles.
long long union_area(const std::vector<Rect>& rects);

/// Coverage ratio: (union of image-1 rects + union of image-2 rects) over
/// the summed image areas.
double proportion(const std::vector<SlicePair>& pairs, const Image& i1,
                  const Image& i2);

/// Area of the intersection between rect `a` mapped through `h` and rect `b`.
double warped_overlap_area(const Rect& a, const AffineTransform& h, const Rect& b);

/// Greedy random selection: iterate candidates in seeded random order,
/// accept a pair iff its rects are disjoint from everything accepted so far
/// in their respective images and the image of rect1 under h0 meets rect2
/// with positive area; stop once the coverage target is reached. Raises
/// constraint-unsatisfiable when exhaustion leaves less than target/2.
SliceSet select(const std::vector<SlicePair>& candidates, double target,
                const AffineTransform& h0, const Image& i1, const Image& i2,
                uint64_t seed);

}  // namespace fao
