#pragma once

#include <cstdint>
#include <string>

#include "fao/core.hpp"

namespace fao {

/// Load a grayscale image. Format by extension: .png (8/16-bit gray),
/// .pgm (binary P5), .f32 (raw little-endian float32 with a JSON sidecar
/// "<path>.json" holding {"width":..,"height":..}).
Image load_image(const std::string& path);

/// Save in the format implied by the extension. Integer formats quantize by
/// the image's bit depth (16 when the image is float-native), clamping to
/// [0, 1]; .f32 writes the raw float grid plus the sidecar.
void save_image(const Image& img, const std::string& path);

/// Box-filter downsampling by an integer factor. Output pixels are the mean
/// of their n x n source block; output is floor(w/n) x floor(h/n). With
/// enforce_min_scale, a factor that leaves the short side under 128 px is
/// rejected (rate-too-high).
Image downsample(const Image& img, int n, bool enforce_min_scale = true);

/// Separable Gaussian blur, kernel truncated at +/-4 sigma, mirror-reflected
/// edges.
Image gaussian_blur(const Image& img, double sigma);

struct SynthSpec {
  Image source;
  AffineTransform truth;  // maps image-1 coordinates to image-2 coordinates
  int looks = 1;          // gamma speckle looks; larger means less noise
  uint64_t seed = 0;
};

struct SynthPair {
  Image i1, i2;
  AffineTransform truth;
  /// 1 where i2 was sampled inside the source footprint, 0 elsewhere.
  Image validity;
};

/// Build a speckled test pair: i1 = source * speckle1 and i2 the warped
/// source * speckle2, so that i2 sampled at truth*p matches i1 at p.
/// Deterministic given the seed. Fails when the warped footprint covers
/// less than 25% of the frame.
SynthPair synth_pair(const SynthSpec& spec);

}  // namespace fao
