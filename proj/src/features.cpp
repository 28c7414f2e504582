#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "fao/features.hpp"
#include "fao/imaging.hpp"

namespace fao {

namespace {

constexpr int kScales = 3;              // sampled scales per octave
constexpr double kSigma0 = 1.6;         // base blur of each octave
constexpr double kInitialSigma = 0.5;   // assumed blur of the input
constexpr double kContrastThreshold = 0.03;
constexpr double kEdgeRatio = 10.0;
constexpr int kOriBins = 36;
constexpr double kOriSigmaFactor = 1.5;
constexpr double kOriPeakRatio = 0.8;
constexpr int kDescWidth = 4;           // 4x4 spatial grid
constexpr int kDescBins = 8;            // orientation bins per cell
constexpr double kDescBinSize = 3.0;    // spatial bin size in units of sigma
constexpr double kDescClamp = 0.2;
constexpr int kMaxRefineSteps = 5;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Octave {
  std::vector<Image> gauss;  // kScales + 3 levels
  std::vector<Image> dog;    // kScales + 2 levels
  int index = 0;             // coordinate scale is 2^index
};

Image decimate(const Image& img) {
  const int w = std::max(1, img.width() / 2);
  const int h = std::max(1, img.height() / 2);
  Image out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out.at(x, y) = img.at(2 * x, 2 * y);
  return out;
}

std::vector<Octave> build_pyramid(const Image& img) {
  const int min_dim = std::min(img.width(), img.height());
  const int octaves = std::max(1, (int)std::floor(std::log2((double)min_dim)) - 6);

  // Per-octave blur schedule: level l sits at sigma0 * 2^(l/kScales).
  std::array<double, kScales + 3> inc{};
  for (int l = 1; l < kScales + 3; ++l) {
    const double prev = kSigma0 * std::pow(2.0, (double)(l - 1) / kScales);
    const double cur = kSigma0 * std::pow(2.0, (double)l / kScales);
    inc[l] = std::sqrt(cur * cur - prev * prev);
  }

  std::vector<Octave> pyr(octaves);
  for (int o = 0; o < octaves; ++o) {
    Octave& oct = pyr[o];
    oct.index = o;
    oct.gauss.reserve(kScales + 3);
    if (o == 0) {
      const double boost =
          std::sqrt(std::max(0.01, kSigma0 * kSigma0 - kInitialSigma * kInitialSigma));
      oct.gauss.push_back(gaussian_blur(img, boost));
    } else {
      // Level kScales of the previous octave carries blur 2*sigma0.
      oct.gauss.push_back(decimate(pyr[o - 1].gauss[kScales]));
    }
    for (int l = 1; l < kScales + 3; ++l)
      oct.gauss.push_back(gaussian_blur(oct.gauss[l - 1], inc[l]));

    oct.dog.reserve(kScales + 2);
    for (int l = 0; l < kScales + 2; ++l) {
      const Image& a = oct.gauss[l];
      const Image& b = oct.gauss[l + 1];
      Image d(a.width(), a.height());
      for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x)
          d.at(x, y) = b.at(x, y) - a.at(x, y);
      oct.dog.push_back(std::move(d));
    }
  }
  return pyr;
}

bool is_extremum(const Octave& oct, int l, int x, int y) {
  const float v = oct.dog[l].at(x, y);
  if (v > 0) {
    for (int dl = -1; dl <= 1; ++dl)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dl == 0 && dy == 0 && dx == 0) continue;
          if (oct.dog[l + dl].at(x + dx, y + dy) >= v) return false;
        }
  } else {
    for (int dl = -1; dl <= 1; ++dl)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dl == 0 && dy == 0 && dx == 0) continue;
          if (oct.dog[l + dl].at(x + dx, y + dy) <= v) return false;
        }
  }
  return true;
}

struct Candidate {
  int layer = 0;     // DoG layer of the refined extremum
  double x = 0, y = 0, l = 0;  // refined octave-frame coordinates
  double contrast = 0;
};

bool refine_extremum(const Octave& oct, int l, int x, int y, Candidate& out) {
  const int w = oct.dog[0].width(), h = oct.dog[0].height();
  double dx = 0, dy = 0, dl = 0;
  double gx = 0, gy = 0, gl = 0;
  for (int step = 0; step < kMaxRefineSteps; ++step) {
    const Image& d0 = oct.dog[l - 1];
    const Image& d1 = oct.dog[l];
    const Image& d2 = oct.dog[l + 1];
    gx = 0.5 * (d1.at(x + 1, y) - d1.at(x - 1, y));
    gy = 0.5 * (d1.at(x, y + 1) - d1.at(x, y - 1));
    gl = 0.5 * (d2.at(x, y) - d0.at(x, y));
    const double v = d1.at(x, y);
    const double hxx = d1.at(x + 1, y) + d1.at(x - 1, y) - 2 * v;
    const double hyy = d1.at(x, y + 1) + d1.at(x, y - 1) - 2 * v;
    const double hll = d2.at(x, y) + d0.at(x, y) - 2 * v;
    const double hxy = 0.25 * (d1.at(x + 1, y + 1) - d1.at(x - 1, y + 1) -
                               d1.at(x + 1, y - 1) + d1.at(x - 1, y - 1));
    const double hxl = 0.25 * (d2.at(x + 1, y) - d2.at(x - 1, y) -
                               d0.at(x + 1, y) + d0.at(x - 1, y));
    const double hyl = 0.25 * (d2.at(x, y + 1) - d2.at(x, y - 1) -
                               d0.at(x, y + 1) + d0.at(x, y - 1));

    Eigen::Matrix3d H;
    H << hxx, hxy, hxl, hxy, hyy, hyl, hxl, hyl, hll;
    const Eigen::Vector3d g(gx, gy, gl);
    const double det = H.determinant();
    if (std::abs(det) < 1e-30) return false;
    const Eigen::Vector3d delta = -H.inverse() * g;
    dx = delta[0];
    dy = delta[1];
    dl = delta[2];
    if (std::abs(dx) < 0.5 && std::abs(dy) < 0.5 && std::abs(dl) < 0.5) {
      const double contrast = d1.at(x, y) + 0.5 * (gx * dx + gy * dy + gl * dl);
      if (std::abs(contrast) < kContrastThreshold) return false;
      // Edge rejection on the 2-D spatial Hessian.
      const double tr = hxx + hyy;
      const double det2 = hxx * hyy - hxy * hxy;
      const double r = kEdgeRatio;
      if (det2 <= 0 || tr * tr * r >= (r + 1) * (r + 1) * det2) return false;
      out.layer = l;
      out.x = x + dx;
      out.y = y + dy;
      out.l = l + dl;
      out.contrast = contrast;
      return true;
    }
    x += (int)std::lround(std::clamp(dx, -1.0, 1.0));
    y += (int)std::lround(std::clamp(dy, -1.0, 1.0));
    l += (int)std::lround(std::clamp(dl, -1.0, 1.0));
    if (l < 1 || l > kScales || x < 1 || x >= w - 1 || y < 1 || y >= h - 1)
      return false;
  }
  return false;
}

// 36-bin gradient-orientation histogram around (x, y) on one pyramid level.
// Returns false when the window collapses to nothing.
bool orientation_histogram(const Image& img, int x, int y, double sigma,
                           std::array<double, kOriBins>& hist) {
  hist.fill(0.0);
  const int radius = std::max(1, (int)std::lround(3.0 * sigma));
  const double denom = 2.0 * sigma * sigma;
  const int w = img.width(), h = img.height();
  bool any = false;
  for (int i = -radius; i <= radius; ++i) {
    const int py = y + i;
    if (py < 1 || py >= h - 1) continue;
    for (int j = -radius; j <= radius; ++j) {
      const int px = x + j;
      if (px < 1 || px >= w - 1) continue;
      const double dx = img.at(px + 1, py) - img.at(px - 1, py);
      const double dy = img.at(px, py - 1) - img.at(px, py + 1);
      const double mag = std::sqrt(dx * dx + dy * dy);
      if (mag <= 0) continue;
      const double weight = std::exp(-((double)i * i + (double)j * j) / denom);
      double angle = std::atan2(dy, dx);
      if (angle < 0) angle += kTwoPi;
      int bin = (int)std::lround(angle / kTwoPi * kOriBins) % kOriBins;
      hist[bin] += weight * mag;
      any = true;
    }
  }
  if (!any) return false;
  // One smoothing pass with the [1 4 6 4 1]/16 kernel, circular.
  std::array<double, kOriBins> s;
  for (int i = 0; i < kOriBins; ++i) {
    const double m2 = hist[(i - 2 + kOriBins) % kOriBins];
    const double m1 = hist[(i - 1 + kOriBins) % kOriBins];
    const double p1 = hist[(i + 1) % kOriBins];
    const double p2 = hist[(i + 2) % kOriBins];
    s[i] = (m2 + p2) / 16.0 + 4.0 * (m1 + p1) / 16.0 + 6.0 * hist[i] / 16.0;
  }
  hist = s;
  return true;
}

// 4x4x8 descriptor at (x, y) with cell size 3*sigma, rotated to theta.
// Returns false when the support window leaves the image.
bool compute_descriptor(const Image& img, double x, double y, double sigma,
                        double theta, std::array<float, 128>& out) {
  const int w = img.width(), h = img.height();
  const double hist_width = kDescBinSize * sigma;
  const double radius_f =
      hist_width * std::numbers::sqrt2 * (kDescWidth + 1) * 0.5;
  const int radius = (int)std::lround(radius_f);
  const int xi = (int)std::lround(x);
  const int yi = (int)std::lround(y);
  if (xi - radius < 1 || xi + radius >= w - 1 || yi - radius < 1 ||
      yi + radius >= h - 1)
    return false;

  const double cos_t = std::cos(theta) / hist_width;
  const double sin_t = std::sin(theta) / hist_width;
  const double bins_per_rad = kDescBins / kTwoPi;
  const double weight_denom = 0.5 * kDescWidth * kDescWidth;  // 2*(0.5*d)^2

  // (d+2)^2 x (bins+2) accumulation buffer; borders absorb spill, the
  // orientation wrap is folded afterwards.
  constexpr int D = kDescWidth + 2;
  constexpr int B = kDescBins + 2;
  std::array<double, D * D * B> acc{};

  for (int i = -radius; i <= radius; ++i) {
    for (int j = -radius; j <= radius; ++j) {
      const double c_rot = j * cos_t - i * sin_t;
      const double r_rot = j * sin_t + i * cos_t;
      const double rbin = r_rot + kDescWidth / 2.0 - 0.5;
      const double cbin = c_rot + kDescWidth / 2.0 - 0.5;
      if (rbin <= -1 || rbin >= kDescWidth || cbin <= -1 || cbin >= kDescWidth)
        continue;
      const int px = xi + j, py = yi + i;
      const double dx = img.at(px + 1, py) - img.at(px - 1, py);
      const double dy = img.at(px, py - 1) - img.at(px, py + 1);
      const double mag = std::sqrt(dx * dx + dy * dy);
      if (mag <= 0) continue;
      double angle = std::atan2(dy, dx) - theta;
      while (angle < 0) angle += kTwoPi;
      while (angle >= kTwoPi) angle -= kTwoPi;
      const double obin = angle * bins_per_rad;
      const double weight =
          std::exp(-(r_rot * r_rot + c_rot * c_rot) / weight_denom);
      const double value = mag * weight;

      const int r0 = (int)std::floor(rbin);
      const int c0 = (int)std::floor(cbin);
      const int o0 = (int)std::floor(obin);
      const double fr = rbin - r0, fc = cbin - c0, fo = obin - o0;
      for (int dr = 0; dr <= 1; ++dr) {
        const double wr = value * (dr ? fr : 1 - fr);
        for (int dc = 0; dc <= 1; ++dc) {
          const double wc = wr * (dc ? fc : 1 - fc);
          for (int dob = 0; dob <= 1; ++dob) {
            const double wo = wc * (dob ? fo : 1 - fo);
            const int rr = r0 + dr + 1, cc = c0 + dc + 1;
            const int oo = (o0 + dob) % kDescBins;
            acc[(rr * D + cc) * B + oo] += wo;
          }
        }
      }
    }
  }

  std::array<double, 128> v{};
  for (int r = 0; r < kDescWidth; ++r)
    for (int c = 0; c < kDescWidth; ++c)
      for (int o = 0; o < kDescBins; ++o)
        v[(r * kDescWidth + c) * kDescBins + o] =
            acc[((r + 1) * D + (c + 1)) * B + o];

  auto norm = [&] {
    double s = 0;
    for (double e : v) s += e * e;
    return std::sqrt(s);
  };
  double n = norm();
  if (n <= 1e-12) return false;
  for (double& e : v) e /= n;
  // Clamp and renormalize until the clamp is a no-op, then clamp once more
  // so every component is at most kDescClamp exactly.
  for (int iter = 0; iter < 32; ++iter) {
    for (double& e : v) e = std::min(e, kDescClamp);
    n = norm();
    if (n <= 1e-12) return false;
    for (double& e : v) e /= n;
    if (n >= 1.0 - 1e-9) break;
  }
  for (int i = 0; i < 128; ++i)
    out[i] = (float)std::min(v[i], kDescClamp);
  return true;
}

}  // namespace

std::vector<Feature> detect_and_describe(const Image& img) {
  if (img.empty() || std::min(img.width(), img.height()) < 64)
    raise(ErrorCode::image_too_small,
          "feature detection needs min(width, height) >= 64");

  const auto pyramid = build_pyramid(img);
  std::vector<Feature> features;

  for (const Octave& oct : pyramid) {
    const double coord_scale = std::pow(2.0, oct.index);
    const int w = oct.dog[0].width(), h = oct.dog[0].height();
    for (int l = 1; l <= kScales; ++l) {
      for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
          if (std::abs(oct.dog[l].at(x, y)) < 0.5 * kContrastThreshold)
            continue;
          if (!is_extremum(oct, l, x, y)) continue;
          Candidate cand;
          if (!refine_extremum(oct, l, x, y, cand)) continue;

          const double sigma_rel = kSigma0 * std::pow(2.0, cand.l / kScales);
          const Image& level = oct.gauss[cand.layer];
          std::array<double, kOriBins> hist;
          if (!orientation_histogram(level, (int)std::lround(cand.x),
                                     (int)std::lround(cand.y),
                                     kOriSigmaFactor * sigma_rel, hist))
            continue;
          const double peak = *std::max_element(hist.begin(), hist.end());
          if (peak <= 0) continue;

          for (int bin = 0; bin < kOriBins; ++bin) {
            const double left = hist[(bin - 1 + kOriBins) % kOriBins];
            const double right = hist[(bin + 1) % kOriBins];
            if (hist[bin] <= left || hist[bin] <= right ||
                hist[bin] < kOriPeakRatio * peak)
              continue;
            const double denom = left - 2 * hist[bin] + right;
            const double offset =
                std::abs(denom) > 1e-12 ? 0.5 * (left - right) / denom : 0.0;
            double theta = (bin + offset) * kTwoPi / kOriBins;
            while (theta < 0) theta += kTwoPi;
            while (theta >= kTwoPi) theta -= kTwoPi;

            Feature f;
            if (!compute_descriptor(level, cand.x, cand.y, sigma_rel, theta,
                                    f.descriptor))
              continue;
            f.x = cand.x * coord_scale;
            f.y = cand.y * coord_scale;
            f.sigma = sigma_rel * coord_scale;
            f.theta = theta;
            features.push_back(f);
          }
        }
      }
    }
  }
  return features;
}

std::vector<FeatureMatch> match_features(const std::vector<Feature>& a,
                                         const std::vector<Feature>& b,
                                         double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0))
    raise(ErrorCode::invalid_argument, "ratio threshold must be in (0, 1)");
  std::vector<FeatureMatch> matches;
  if (a.empty() || b.size() < 2) return matches;

  using Mat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Mat A((int)a.size(), 128), B((int)b.size(), 128);
  for (size_t i = 0; i < a.size(); ++i)
    for (int k = 0; k < 128; ++k) A((int)i, k) = a[i].descriptor[k];
  for (size_t i = 0; i < b.size(); ++i)
    for (int k = 0; k < 128; ++k) B((int)i, k) = b[i].descriptor[k];
  const Eigen::VectorXf a2 = A.rowwise().squaredNorm();
  const Eigen::VectorXf b2 = B.rowwise().squaredNorm();
  const Mat G = A * B.transpose();

  auto exact_sq = [&](int i, int j) {
    double acc = 0.0;
    for (int k = 0; k < 128; ++k) {
      const double d = (double)a[i].descriptor[k] - b[j].descriptor[k];
      acc += d * d;
    }
    return acc;
  };

  for (int i = 0; i < (int)a.size(); ++i) {
    double d1 = std::numeric_limits<double>::infinity();
    double d2 = d1;
    int best = -1, second = -1;
    for (int j = 0; j < (int)b.size(); ++j) {
      const double d = std::max(0.0, (double)a2[i] + b2[j] - 2.0 * G(i, j));
      if (d < d1) {
        d2 = d1;
        second = best;
        d1 = d;
        best = j;
      } else if (d < d2) {
        d2 = d;
        second = j;
      }
    }
    if (best < 0 || second < 0) continue;
    // The GEMM pass only screens; the two finalists get exact distances.
    const double dist1 = std::sqrt(exact_sq(i, best));
    const double dist2 = std::sqrt(exact_sq(i, second));
    if (dist2 <= 0) continue;
    const double r = dist1 / dist2;
    if (r < ratio) matches.push_back({i, best, dist1, r});
  }
  return matches;
}

}  // namespace fao
