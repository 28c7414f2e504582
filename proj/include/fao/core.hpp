#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fao/errors.hpp"

namespace fao {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// 2-D affine map with an implicit (0, 0, 1) bottom row. Maps coordinates of
/// image 1 into coordinates of image 2.
struct AffineTransform {
  double a1 = 1.0, b1 = 0.0, c1 = 0.0;
  double a2 = 0.0, b2 = 1.0, c2 = 0.0;

  static AffineTransform identity() { return {}; }
  static AffineTransform translation(double tx, double ty);
  /// Rotation by `angle` radians and isotropic `scale` about (cx, cy),
  /// followed by a translation (tx, ty).
  static AffineTransform similarity(double cx, double cy, double angle,
                                    double scale, double tx, double ty);

  double det() const { return a1 * b2 - b1 * a2; }
  std::array<double, 6> coeffs() const { return {a1, b1, c1, a2, b2, c2}; }
  static AffineTransform from_coeffs(const std::array<double, 6>& c) {
    return {c[0], c[1], c[2], c[3], c[4], c[5]};
  }
};

Point apply_transform(const AffineTransform& h, const Point& p);
AffineTransform invert(const AffineTransform& h);
/// Matrix product h2 * h1: apply h1 first, then h2.
AffineTransform compose(const AffineTransform& h2, const AffineTransform& h1);

/// Flat JSON object {"a1":..,"b1":..,"c1":..,"a2":..,"b2":..,"c2":..} with
/// full double precision.
std::string transform_to_json(const AffineTransform& h);
AffineTransform transform_from_json(const std::string& text);

using PointSet = std::vector<Point>;

/// Integer-aligned rectangle covering pixels [x0, x0+width) x [y0, y0+height).
struct Rect {
  int x0 = 0, y0 = 0;
  int width = 0, height = 0;

  long long area() const { return (long long)width * (long long)height; }
  int x1() const { return x0 + width; }  // exclusive
  int y1() const { return y0 + height; }
  bool empty() const { return width <= 0 || height <= 0; }
  bool contains(const Rect& inner) const {
    return inner.x0 >= x0 && inner.y0 >= y0 && inner.x1() <= x1() &&
           inner.y1() <= y1();
  }
};

Rect intersect(const Rect& a, const Rect& b);

/// Single-channel raster. Images loaded from integer formats are normalized
/// to [0, 1]; synthetic float data may exceed that range.
class Image {
 public:
  Image() = default;
  Image(int width, int height, float fill = 0.0f);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }
  Rect bounds() const { return {0, 0, width_, height_}; }

  float at(int x, int y) const { return data_[(size_t)y * width_ + x]; }
  float& at(int x, int y) { return data_[(size_t)y * width_ + x]; }

  const std::vector<float>& pixels() const { return data_; }
  std::vector<float>& pixels() { return data_; }

  /// Source bit depth: 8 or 16 for images loaded from integer formats,
  /// 0 for float-native data.
  int bit_depth = 0;

 private:
  int width_ = 0, height_ = 0;
  std::vector<float> data_;
};

/// Bilinear sample at a real-valued position. Absent when p lies outside
/// [0, w-1] x [0, h-1].
std::optional<double> sample_bilinear(const Image& img, const Point& p);

Image crop(const Image& img, const Rect& r);

/// Derive an independent stream seed from a run seed and a fixed salt.
uint64_t mix_seed(uint64_t seed, uint64_t salt);

}  // namespace fao
