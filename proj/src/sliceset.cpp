#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "fao/sliceset.hpp"
#include "random_util.hpp"

namespace fao {

namespace {

using Poly = std::vector<Point>;

double polygon_area(const Poly& poly) {
  double acc = 0.0;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % n];
    acc += a.x * b.y - b.x * a.y;
  }
  return std::abs(acc) * 0.5;
}

// Clip a convex polygon against the half-plane nx*x + ny*y <= c.
Poly clip_halfplane(const Poly& poly, double nx, double ny, double c) {
  Poly out;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % n];
    const double da = nx * a.x + ny * a.y - c;
    const double db = nx * b.x + ny * b.y - c;
    if (da <= 0) out.push_back(a);
    if ((da < 0 && db > 0) || (da > 0 && db < 0)) {
      const double t = da / (da - db);
      out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  return out;
}

}  // namespace

std::vector<SlicePair> build_candidates(const std::vector<PointMatch>& matches,
                                        const std::vector<bool>& inliers,
                                        const Image& i1, const Image& i2,
                                        int slice_size) {
  if (slice_size < 2)
    raise(ErrorCode::invalid_argument, "slice size must be >= 2");
  const int half = slice_size / 2;
  const int min_side = slice_size / 2;

  std::vector<SlicePair> out;
  for (size_t i = 0; i < matches.size(); ++i) {
    if (i < inliers.size() && !inliers[i]) continue;
    const auto& m = matches[i];
    Rect r1{(int)std::lround(m.p1.x) - half, (int)std::lround(m.p1.y) - half,
            slice_size, slice_size};
    Rect r2{(int)std::lround(m.p2.x) - half, (int)std::lround(m.p2.y) - half,
            slice_size, slice_size};
    r1 = intersect(r1, i1.bounds());
    r2 = intersect(r2, i2.bounds());
    if (r1.width < min_side || r1.height < min_side || r2.width < min_side ||
        r2.height < min_side)
      continue;
    SlicePair p;
    p.rect1 = r1;
    p.rect2 = r2;
    p.index = (int)out.size();
    p.match_id = (int)i;
    out.push_back(p);
  }
  return out;
}

long long overlap_area(const Rect& a, const Rect& b) {
  return intersect(a, b).area();
}

long long union_area(const std::vector<Rect>& rects) {
  std::vector<int> xs;
  xs.reserve(rects.size() * 2);
  for (const Rect& r : rects) {
    if (r.empty()) continue;
    xs.push_back(r.x0);
    xs.push_back(r.x1());
  }
  if (xs.empty()) return 0;
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  long long total = 0;
  std::vector<std::array<int, 2>> spans;
  for (size_t i = 0; i + 1 < xs.size(); ++i) {
    const int x0 = xs[i], x1 = xs[i + 1];
    spans.clear();
    for (const Rect& r : rects) {
      if (r.empty() || r.x0 > x0 || r.x1() < x1) continue;
      spans.push_back({r.y0, r.y1()});
    }
    if (spans.empty()) continue;
    std::sort(spans.begin(), spans.end());
    long long covered = 0;
    int cur0 = spans[0][0], cur1 = spans[0][1];
    for (size_t k = 1; k < spans.size(); ++k) {
      if (spans[k][0] > cur1) {
        covered += cur1 - cur0;
        cur0 = spans[k][0];
        cur1 = spans[k][1];
      } else {
        cur1 = std::max(cur1, spans[k][1]);
      }
    }
    covered += cur1 - cur0;
    total += covered * (long long)(x1 - x0);
  }
  return total;
}

double proportion(const std::vector<SlicePair>& pairs, const Image& i1,
                  const Image& i2) {
  std::vector<Rect> r1, r2;
  r1.reserve(pairs.size());
  r2.reserve(pairs.size());
  for (const auto& p : pairs) {
    r1.push_back(p.rect1);
    r2.push_back(p.rect2);
  }
  const double denom =
      (double)i1.bounds().area() + (double)i2.bounds().area();
  return ((double)union_area(r1) + (double)union_area(r2)) / denom;
}

double warped_overlap_area(const Rect& a, const AffineTransform& h,
                           const Rect& b) {
  Poly poly{apply_transform(h, {(double)a.x0, (double)a.y0}),
            apply_transform(h, {(double)a.x1(), (double)a.y0}),
            apply_transform(h, {(double)a.x1(), (double)a.y1()}),
            apply_transform(h, {(double)a.x0, (double)a.y1()})};
  poly = clip_halfplane(poly, -1, 0, -(double)b.x0);
  if (poly.size() < 3) return 0.0;
  poly = clip_halfplane(poly, 1, 0, (double)b.x1());
  if (poly.size() < 3) return 0.0;
  poly = clip_halfplane(poly, 0, -1, -(double)b.y0);
  if (poly.size() < 3) return 0.0;
  poly = clip_halfplane(poly, 0, 1, (double)b.y1());
  if (poly.size() < 3) return 0.0;
  return polygon_area(poly);
}

SliceSet select(const std::vector<SlicePair>& candidates, double target,
                const AffineTransform& h0, const Image& i1, const Image& i2,
                uint64_t seed) {
  if (!(target > 0.0 && target <= 1.0))
    raise(ErrorCode::invalid_argument, "proportion target must be in (0, 1]");

  std::vector<int> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  detail::shuffle_in_place(order, rng);

  SliceSet set;
  for (int idx : order) {
    const SlicePair& cand = candidates[idx];
    bool disjoint = true;
    for (const auto& acc : set.pairs) {
      if (overlap_area(acc.rect1, cand.rect1) != 0 ||
          overlap_area(acc.rect2, cand.rect2) != 0) {
        disjoint = false;
        break;
      }
    }
    if (!disjoint) continue;
    if (warped_overlap_area(cand.rect1, h0, cand.rect2) <= 0.0) continue;

    SlicePair accepted = cand;
    accepted.index = (int)set.pairs.size();
    set.pairs.push_back(accepted);
    set.proportion = proportion(set.pairs, i1, i2);
    if (set.proportion >= target) break;
  }

  if (set.pairs.empty() || set.proportion < target / 2.0)
    raise(ErrorCode::constraint_unsatisfiable,
          "selection reached only " + std::to_string(set.proportion * 100.0) +
              "% of the " + std::to_string(target * 100.0) + "% target");

  // Re-verify the set invariants before handing it out.
  for (size_t i = 0; i < set.pairs.size(); ++i) {
    for (size_t j = i + 1; j < set.pairs.size(); ++j) {
      if (overlap_area(set.pairs[i].rect1, set.pairs[j].rect1) != 0 ||
          overlap_area(set.pairs[i].rect2, set.pairs[j].rect2) != 0)
        raise(ErrorCode::internal, "slice set violates the disjointness limit");
    }
    if (warped_overlap_area(set.pairs[i].rect1, h0, set.pairs[i].rect2) <= 0.0)
      raise(ErrorCode::internal, "slice pair lost its common support");
  }
  set.proportion = proportion(set.pairs, i1, i2);
  return set;
}

}  // namespace fao
