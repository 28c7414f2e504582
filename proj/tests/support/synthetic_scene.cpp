#include "synthetic_scene.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace fao::testing {

Image make_textured_image(int width, int height, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Image img(width, height, 0.5f);

  // Patchwork base: rectangles and disks painted big-to-small so structure
  // survives at every octave. Junctions between patches supply corners;
  // painted levels keep full local contrast.
  struct Patch {
    double size, cx, cy;
    float level, blend;
    bool disk;
  };
  const int n_patches = std::max(200, width * height / 700);
  std::vector<Patch> patches(n_patches);
  for (Patch& p : patches) {
    p.size = 2.0 * std::pow(40.0, unit(rng));  // 2 .. 80 px
    p.cx = unit(rng) * width;
    p.cy = unit(rng) * height;
    p.level = (float)(0.08 + 0.84 * unit(rng));
    p.blend = (float)(0.55 + 0.45 * unit(rng));
    p.disk = unit(rng) < 0.4;
  }
  std::sort(patches.begin(), patches.end(),
            [](const Patch& a, const Patch& b) { return a.size > b.size; });
  for (const Patch& p : patches) {
    const int r = (int)std::ceil(p.size);
    const int x0 = std::max(0, (int)p.cx - r);
    const int x1 = std::min(width - 1, (int)p.cx + r);
    const int y0 = std::max(0, (int)p.cy - r);
    const int y1 = std::min(height - 1, (int)p.cy + r);
    if (p.disk) {
      const double r2 = p.size * p.size;
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
          if ((x - p.cx) * (x - p.cx) + (y - p.cy) * (y - p.cy) <= r2)
            img.at(x, y) += p.blend * (p.level - img.at(x, y));
    } else {
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
          img.at(x, y) += p.blend * (p.level - img.at(x, y));
    }
  }

  // Fine detail on top.
  Image noise(width, height);
  for (float& v : noise.pixels()) v = (float)(unit(rng) - 0.5);
  noise = gaussian_blur(noise, 0.7);
  for (size_t i = 0; i < img.pixels().size(); ++i)
    img.pixels()[i] += 0.25f * noise.pixels()[i];

  for (float& v : img.pixels()) v = std::clamp(v, 0.03f, 0.97f);
  return img;
}

Image make_smooth_image(int width, int height, uint64_t seed, double sigma) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Image img(width, height);
  for (float& v : img.pixels()) v = (float)unit(rng);
  img = gaussian_blur(img, sigma);
  float lo = img.pixels()[0], hi = img.pixels()[0];
  for (float v : img.pixels()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const float span = std::max(1e-6f, hi - lo);
  for (float& v : img.pixels()) v = 0.1f + 0.8f * (v - lo) / span;
  return img;
}

}  // namespace fao::testing
