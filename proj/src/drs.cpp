#include <algorithm>
#include <cmath>
#include <numeric>

#include "fao/drs.hpp"
#include "fao/imaging.hpp"
#include "random_util.hpp"

namespace fao {

int square_side(int rate) { return std::max(rate * rate, 64); }

std::vector<LowResMatch> demarcate_superposition(const Image& i1,
                                                 const Image& i2,
                                                 const DrsConfig& cfg) {
  if (cfg.rate < 1)
    raise(ErrorCode::invalid_argument, "downsampling rate must be >= 1");
  const Image lo1 = downsample(i1, cfg.rate);
  const Image lo2 = downsample(i2, cfg.rate);
  const auto f1 = detect_and_describe(lo1);
  const auto f2 = detect_and_describe(lo2);
  const auto matches = match_features(f1, f2, cfg.ratio);

  std::vector<LowResMatch> out;
  out.reserve(matches.size());
  for (const auto& m : matches)
    out.push_back({{f1[m.index1].x, f1[m.index1].y},
                   {f2[m.index2].x, f2[m.index2].y},
                   m.distance,
                   m.ratio});
  if ((int)out.size() < cfg.min_low_res_matches)
    raise(ErrorCode::too_few_matches,
          "only " + std::to_string(out.size()) +
              " low-resolution matches; the images may not overlap");
  return out;
}

namespace {

// One square per keypoint, slid inside the image so the full side survives
// whenever the image is large enough.
Rect place_square(const Point& center, int side, const Rect& bounds) {
  int x0 = (int)std::lround(center.x) - side / 2;
  int y0 = (int)std::lround(center.y) - side / 2;
  x0 = std::clamp(x0, 0, std::max(0, bounds.width - side));
  y0 = std::clamp(y0, 0, std::max(0, bounds.height - side));
  Rect r{x0, y0, side, side};
  return intersect(r, bounds);
}

void add_square(std::vector<Rect>& squares, const Rect& r, int side) {
  const double min_dist = side / 2.0;
  const double cx = r.x0 + r.width / 2.0;
  const double cy = r.y0 + r.height / 2.0;
  for (const Rect& q : squares) {
    const double dx = cx - (q.x0 + q.width / 2.0);
    const double dy = cy - (q.y0 + q.height / 2.0);
    if (std::sqrt(dx * dx + dy * dy) < min_dist) return;
  }
  squares.push_back(r);
}

}  // namespace

SquareSets incise_squares(const std::vector<LowResMatch>& matches,
                          const Image& i1, const Image& i2,
                          const DrsConfig& cfg) {
  if (matches.empty())
    raise(ErrorCode::invalid_argument, "no matches to incise around");
  const int side = square_side(cfg.rate);

  std::vector<int> order(matches.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(cfg.seed);
  detail::shuffle_in_place(order, rng);

  SquareSets out;
  for (int idx : order) {
    const LowResMatch& m = matches[idx];
    const Point c1{m.p1.x * cfg.rate, m.p1.y * cfg.rate};
    const Point c2{m.p2.x * cfg.rate, m.p2.y * cfg.rate};
    add_square(out.squares1, place_square(c1, side, i1.bounds()), side);
    add_square(out.squares2, place_square(c2, side, i2.bounds()), side);
  }
  return out;
}

namespace {

std::vector<Feature> detect_in_squares(const Image& img,
                                       const std::vector<Rect>& squares) {
  std::vector<Feature> all;
  for (const Rect& r : squares) {
    if (std::min(r.width, r.height) < 64) continue;
    const Image patch = crop(img, r);
    auto features = detect_and_describe(patch);
    for (Feature& f : features) {
      f.x += r.x0;
      f.y += r.y0;
      all.push_back(f);
    }
  }
  return all;
}

}  // namespace

DrsOutput extract_original_resolution(const Image& i1, const Image& i2,
                                      const SquareSets& squares) {
  if (squares.squares1.empty() || squares.squares2.empty())
    raise(ErrorCode::invalid_argument, "no squares to extract from");
  DrsOutput out;
  out.squares1 = squares.squares1;
  out.squares2 = squares.squares2;
  out.features1 = detect_in_squares(i1, squares.squares1);
  out.features2 = detect_in_squares(i2, squares.squares2);
  return out;
}

DrsOutput run_drs(const Image& i1, const Image& i2, const DrsConfig& cfg) {
  if (cfg.rate == 1) {
    // Degenerate rate: the low-resolution space is the original space, so
    // detection runs over each whole image.
    DrsConfig c = cfg;
    c.min_low_res_matches = cfg.min_low_res_matches;
    auto matches = demarcate_superposition(i1, i2, c);
    DrsOutput out;
    out.low_res_matches = std::move(matches);
    out.squares1 = {i1.bounds()};
    out.squares2 = {i2.bounds()};
    out.features1 = detect_and_describe(i1);
    out.features2 = detect_and_describe(i2);
    return out;
  }
  auto matches = demarcate_superposition(i1, i2, cfg);
  const SquareSets squares = incise_squares(matches, i1, i2, cfg);
  DrsOutput out = extract_original_resolution(i1, i2, squares);
  out.low_res_matches = std::move(matches);
  return out;
}

}  // namespace fao
