#include "fao/core.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

namespace fao {

AffineTransform AffineTransform::translation(double tx, double ty) {
  return {1.0, 0.0, tx, 0.0, 1.0, ty};
}

AffineTransform AffineTransform::similarity(double cx, double cy, double angle,
                                            double scale, double tx,
                                            double ty) {
  const double ca = scale * std::cos(angle);
  const double sa = scale * std::sin(angle);
  AffineTransform h;
  h.a1 = ca;
  h.b1 = -sa;
  h.a2 = sa;
  h.b2 = ca;
  h.c1 = cx - (ca * cx - sa * cy) + tx;
  h.c2 = cy - (sa * cx + ca * cy) + ty;
  return h;
}

Point apply_transform(const AffineTransform& h, const Point& p) {
  return {h.a1 * p.x + h.b1 * p.y + h.c1, h.a2 * p.x + h.b2 * p.y + h.c2};
}

AffineTransform invert(const AffineTransform& h) {
  const double det = h.det();
  if (std::abs(det) < 1e-12)
    raise(ErrorCode::singular_transform,
          "transform is singular (|det| < 1e-12)");
  AffineTransform inv;
  inv.a1 = h.b2 / det;
  inv.b1 = -h.b1 / det;
  inv.a2 = -h.a2 / det;
  inv.b2 = h.a1 / det;
  inv.c1 = (h.b1 * h.c2 - h.b2 * h.c1) / det;
  inv.c2 = (h.a2 * h.c1 - h.a1 * h.c2) / det;
  return inv;
}

AffineTransform compose(const AffineTransform& h2, const AffineTransform& h1) {
  AffineTransform r;
  r.a1 = h2.a1 * h1.a1 + h2.b1 * h1.a2;
  r.b1 = h2.a1 * h1.b1 + h2.b1 * h1.b2;
  r.c1 = h2.a1 * h1.c1 + h2.b1 * h1.c2 + h2.c1;
  r.a2 = h2.a2 * h1.a1 + h2.b2 * h1.a2;
  r.b2 = h2.a2 * h1.b1 + h2.b2 * h1.b2;
  r.c2 = h2.a2 * h1.c1 + h2.b2 * h1.c2 + h2.c2;
  return r;
}

std::string transform_to_json(const AffineTransform& h) {
  nlohmann::ordered_json j;
  j["a1"] = h.a1;
  j["b1"] = h.b1;
  j["c1"] = h.c1;
  j["a2"] = h.a2;
  j["b2"] = h.b2;
  j["c2"] = h.c2;
  return j.dump();
}

AffineTransform transform_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    raise(ErrorCode::malformed_file, "transform JSON is not an object");
  AffineTransform h;
  struct Field {
    const char* name;
    double* slot;
  };
  const Field fields[] = {{"a1", &h.a1}, {"b1", &h.b1}, {"c1", &h.c1},
                          {"a2", &h.a2}, {"b2", &h.b2}, {"c2", &h.c2}};
  for (const auto& f : fields) {
    auto it = j.find(f.name);
    if (it == j.end() || !it->is_number())
      raise(ErrorCode::malformed_file,
            std::string("transform JSON missing numeric field ") + f.name);
    *f.slot = it->get<double>();
  }
  return h;
}

Rect intersect(const Rect& a, const Rect& b) {
  const int x0 = std::max(a.x0, b.x0);
  const int y0 = std::max(a.y0, b.y0);
  const int x1 = std::min(a.x1(), b.x1());
  const int y1 = std::min(a.y1(), b.y1());
  if (x1 <= x0 || y1 <= y0) return {x0, y0, 0, 0};
  return {x0, y0, x1 - x0, y1 - y0};
}

Image::Image(int width, int height, float fill)
    : width_(width), height_(height) {
  if (width < 1 || height < 1)
    raise(ErrorCode::invalid_argument, "image dimensions must be >= 1");
  data_.assign((size_t)width * height, fill);
}

std::optional<double> sample_bilinear(const Image& img, const Point& p) {
  const int w = img.width(), h = img.height();
  if (!(p.x >= 0.0 && p.x <= w - 1 && p.y >= 0.0 && p.y <= h - 1))
    return std::nullopt;
  int x0 = (w == 1) ? 0 : std::min((int)p.x, w - 2);
  int y0 = (h == 1) ? 0 : std::min((int)p.y, h - 2);
  const double fx = p.x - x0;
  const double fy = p.y - y0;
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  const double v00 = img.at(x0, y0), v10 = img.at(x1, y0);
  const double v01 = img.at(x0, y1), v11 = img.at(x1, y1);
  return (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) +
         fy * ((1.0 - fx) * v01 + fx * v11);
}

Image crop(const Image& img, const Rect& r) {
  if (r.empty() || !img.bounds().contains(r))
    raise(ErrorCode::invalid_argument, "crop rect outside image bounds");
  Image out(r.width, r.height);
  out.bit_depth = img.bit_depth;
  for (int y = 0; y < r.height; ++y)
    for (int x = 0; x < r.width; ++x)
      out.at(x, y) = img.at(r.x0 + x, r.y0 + y);
  return out;
}

uint64_t mix_seed(uint64_t seed, uint64_t salt) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace fao
