#pragma once

#include <cstdint>
#include <vector>

#include "fao/core.hpp"
#include "fao/features.hpp"

namespace fao {

struct DrsConfig {
  int rate = 4;        // downsampling denominator N
  double ratio = 0.8;  // matcher ratio threshold
  uint64_t seed = 0;
  int min_low_res_matches = 4;
};

/// A matched keypoint pair in the downsampled frame.
struct LowResMatch {
  Point p1, p2;
  double distance = 0.0;
  double ratio = 0.0;
};

struct SquareSets {
  std::vector<Rect> squares1, squares2;
};

struct DrsOutput {
  std::vector<Feature> features1, features2;  // original-resolution coordinates
  std::vector<LowResMatch> low_res_matches;
  std::vector<Rect> squares1, squares2;
};

/// Side length of the incised squares for a given rate: max(N^2, 64).
int square_side(int rate);

/// Downsample both images by the rate, detect and match; coordinates stay in
/// the low-resolution frame. Fails when fewer than min_low_res_matches pairs
/// survive the ratio test.
std::vector<LowResMatch> demarcate_superposition(const Image& i1,
                                                 const Image& i2,
                                                 const DrsConfig& cfg);

/// Map each matched keypoint back to original coordinates and place one
/// square around it per image, kept inside bounds; near-duplicate squares
/// (center distance under side/2) are dropped. Placement order is randomized
/// by the seed.
SquareSets incise_squares(const std::vector<LowResMatch>& matches,
                          const Image& i1, const Image& i2,
                          const DrsConfig& cfg);

/// Detect independently inside every square and translate feature positions
/// into full-image coordinates.
DrsOutput extract_original_resolution(const Image& i1, const Image& i2,
                                      const SquareSets& squares);

/// The full dual-resolution pipeline. A rate of 1 degenerates to plain
/// detection over each whole image.
DrsOutput run_drs(const Image& i1, const Image& i2, const DrsConfig& cfg);

}  // namespace fao
