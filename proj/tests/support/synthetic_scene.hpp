#pragma once

#include <cstdint>

#include "fao/core.hpp"
#include "fao/imaging.hpp"

namespace fao::testing {

/// Deterministic textured scene: blobs at many scales, a few hard edges and
/// a layer of fine detail, normalized into [0.15, 0.9]. Feature-rich at both
/// full and downsampled resolution.
Image make_textured_image(int width, int height, uint64_t seed);

/// A smooth random field (blurred noise), handy for gradient checks.
Image make_smooth_image(int width, int height, uint64_t seed, double sigma = 2.0);

}  // namespace fao::testing
