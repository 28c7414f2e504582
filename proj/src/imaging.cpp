#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "fao/imaging.hpp"

namespace fao {

namespace {

// Reflect an index into [0, n) about the edge pixel centers (…2,1,0,1,2…).
int mirror_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i = std::abs(i) % period;
  return i < n ? i : period - i;
}

std::vector<double> gaussian_kernel(double sigma, int radius) {
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-(double)i * i / (2.0 * sigma * sigma));
    k[i + radius] = v;
    sum += v;
  }
  for (double& v : k) v /= sum;
  return k;
}

}  // namespace

Image downsample(const Image& img, int n, bool enforce_min_scale) {
  if (n < 1) raise(ErrorCode::invalid_argument, "downsample factor must be >= 1");
  const int min_dim = std::min(img.width(), img.height());
  if (enforce_min_scale && (double)min_dim / n < 128.0)
    raise(ErrorCode::rate_too_high,
          "downsampling rate 1:" + std::to_string(n) + " leaves " +
              std::to_string(min_dim / n) + " px, below the 128 px minimum");
  const int ow = img.width() / n;
  const int oh = img.height() / n;
  if (ow < 1 || oh < 1)
    raise(ErrorCode::rate_too_high, "downsampling factor exceeds image size");
  Image out(ow, oh);
  out.bit_depth = img.bit_depth;
  const double inv = 1.0 / ((double)n * n);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int dy = 0; dy < n; ++dy)
        for (int dx = 0; dx < n; ++dx) acc += img.at(x * n + dx, y * n + dy);
      out.at(x, y) = (float)(acc * inv);
    }
  }
  return out;
}

Image gaussian_blur(const Image& img, double sigma) {
  if (!(sigma > 0.0))
    raise(ErrorCode::invalid_argument, "blur sigma must be positive");
  const int radius = std::max(1, (int)std::ceil(4.0 * sigma));
  const auto kernel = gaussian_kernel(sigma, radius);
  const int w = img.width(), h = img.height();

  Image tmp(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i)
        acc += kernel[i + radius] * img.at(mirror_index(x + i, w), y);
      tmp.at(x, y) = (float)acc;
    }
  }
  Image out(w, h);
  out.bit_depth = img.bit_depth;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i)
        acc += kernel[i + radius] * tmp.at(x, mirror_index(y + i, h));
      out.at(x, y) = (float)acc;
    }
  }
  return out;
}

SynthPair synth_pair(const SynthSpec& spec) {
  if (spec.source.empty())
    raise(ErrorCode::invalid_argument, "synth source image is empty");
  if (spec.looks < 1)
    raise(ErrorCode::invalid_argument, "speckle looks must be >= 1");
  invert(spec.truth);  // validates invertibility up front

  const int w = spec.source.width(), h = spec.source.height();
  const AffineTransform hinv = invert(spec.truth);

  SynthPair out;
  out.truth = spec.truth;
  out.i1 = spec.source;
  out.i1.bit_depth = 0;
  out.i2 = Image(w, h);
  out.validity = Image(w, h);

  long long valid = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto v = sample_bilinear(spec.source, apply_transform(hinv, {(double)x, (double)y}));
      if (v) {
        out.i2.at(x, y) = (float)*v;
        out.validity.at(x, y) = 1.0f;
        ++valid;
      }
    }
  }
  const double overlap = (double)valid / ((double)w * h);
  if (overlap < 0.25)
    raise(ErrorCode::insufficient_overlap,
          "warped footprint covers only " + std::to_string(overlap * 100.0) +
              "% of the frame (need 25%)");

  // Unit-mean gamma speckle, an independent field per image.
  const double looks = spec.looks;
  auto speckle = [&](Image& img, uint64_t salt) {
    std::mt19937_64 rng(mix_seed(spec.seed, salt));
    std::gamma_distribution<double> gamma(looks, 1.0 / looks);
    auto& px = img.pixels();
    for (float& v : px) v = (float)(v * gamma(rng));
  };
  speckle(out.i1, 0x51);
  speckle(out.i2, 0x52);
  return out;
}

}  // namespace fao
