#include <Eigen/Dense>
#include <cmath>

#include "fao/initializer.hpp"
#include "random_util.hpp"

namespace fao {

std::vector<PointMatch> to_point_matches(const std::vector<Feature>& a,
                                         const std::vector<Feature>& b,
                                         const std::vector<FeatureMatch>& matches) {
  std::vector<PointMatch> out;
  out.reserve(matches.size());
  for (const auto& m : matches)
    out.push_back({{a[m.index1].x, a[m.index1].y}, {b[m.index2].x, b[m.index2].y}});
  return out;
}

AffineTransform estimate_affine_lsq(const std::vector<PointMatch>& pairs) {
  if (pairs.size() < 3)
    raise(ErrorCode::invalid_argument, "affine fit needs at least 3 pairs");

  Eigen::Matrix3d N = Eigen::Matrix3d::Zero();
  Eigen::Vector3d bx = Eigen::Vector3d::Zero();
  Eigen::Vector3d by = Eigen::Vector3d::Zero();
  for (const auto& m : pairs) {
    const Eigen::Vector3d row(m.p1.x, m.p1.y, 1.0);
    N += row * row.transpose();
    bx += row * m.p2.x;
    by += row * m.p2.y;
  }

  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(N);
  const double lo = eig.eigenvalues()[0];
  const double hi = eig.eigenvalues()[2];
  if (!(lo > 0.0) || hi / lo > 1e12)
    raise(ErrorCode::degenerate_configuration,
          "source points are collinear or nearly so");

  const Eigen::Vector3d u = N.ldlt().solve(bx);
  const Eigen::Vector3d v = N.ldlt().solve(by);
  return {u[0], u[1], u[2], v[0], v[1], v[2]};
}

namespace {

double reprojection_error(const AffineTransform& h, const PointMatch& m) {
  const Point q = apply_transform(h, m.p1);
  const double dx = q.x - m.p2.x;
  const double dy = q.y - m.p2.y;
  return std::sqrt(dx * dx + dy * dy);
}

std::vector<bool> consensus_of(const AffineTransform& h,
                               const std::vector<PointMatch>& matches,
                               double tau, int& count) {
  std::vector<bool> mask(matches.size(), false);
  count = 0;
  for (size_t i = 0; i < matches.size(); ++i) {
    if (reprojection_error(h, matches[i]) < tau) {
      mask[i] = true;
      ++count;
    }
  }
  return mask;
}

}  // namespace

RansacResult ransac_affine(const std::vector<PointMatch>& matches,
                           const RansacConfig& cfg) {
  if (matches.size() < 3)
    raise(ErrorCode::invalid_argument, "RANSAC needs at least 3 matches");
  if (!(cfg.inlier_threshold > 0.0) || cfg.max_iterations < 1)
    raise(ErrorCode::invalid_argument, "bad RANSAC configuration");

  std::mt19937_64 rng(cfg.seed);
  const uint32_t n = (uint32_t)matches.size();

  RansacResult best;
  int best_count = 0;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    uint32_t i0 = detail::bounded_rand(rng, n);
    uint32_t i1 = detail::bounded_rand(rng, n);
    uint32_t i2 = detail::bounded_rand(rng, n);
    if (i0 == i1 || i0 == i2 || i1 == i2) continue;

    const Point& p0 = matches[i0].p1;
    const Point& p1 = matches[i1].p1;
    const Point& p2 = matches[i2].p1;
    const double area2 = (p1.x - p0.x) * (p2.y - p0.y) -
                         (p2.x - p0.x) * (p1.y - p0.y);
    if (std::abs(area2) < 1e-6) continue;

    AffineTransform h;
    try {
      h = estimate_affine_lsq({matches[i0], matches[i1], matches[i2]});
    } catch (const Error&) {
      continue;
    }
    int count = 0;
    std::vector<bool> mask = consensus_of(h, matches, cfg.inlier_threshold, count);
    if (count > best_count) {
      best_count = count;
      best.hypothesis = h;
      best.consensus = std::move(mask);
      best.best_iteration = it;
    }
  }

  if (best_count < cfg.min_inliers)
    raise(ErrorCode::no_consensus,
          "best consensus has " + std::to_string(best_count) +
              " inliers, need " + std::to_string(cfg.min_inliers));

  std::vector<PointMatch> support;
  support.reserve(best_count);
  for (size_t i = 0; i < matches.size(); ++i)
    if (best.consensus[i]) support.push_back(matches[i]);

  best.transform = best.hypothesis;
  try {
    best.transform = estimate_affine_lsq(support);
  } catch (const Error&) {
    // Keep the hypothesis when the consensus set is itself degenerate.
  }
  best.inliers =
      consensus_of(best.transform, matches, cfg.inlier_threshold, best.inlier_count);
  return best;
}

}  // namespace fao
