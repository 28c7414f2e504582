#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "fao/optimizer.hpp"

namespace fao {

namespace {

// Residual and image-2 spatial gradient at one warped sample. Returns false
// when the sample leaves image 2.
struct Sample {
  double r, gx, gy;
};

inline bool warped_sample(const Image& i2, double qx, double qy, double v1,
                          Sample& out) {
  const int w = i2.width(), h = i2.height();
  if (!(qx >= 0.0 && qx <= w - 1 && qy >= 0.0 && qy <= h - 1)) return false;
  const int x0 = (w == 1) ? 0 : std::min((int)qx, w - 2);
  const int y0 = (h == 1) ? 0 : std::min((int)qy, h - 2);
  const double fx = qx - x0;
  const double fy = qy - y0;
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  const double v00 = i2.at(x0, y0), v10 = i2.at(x1, y0);
  const double v01 = i2.at(x0, y1), v11 = i2.at(x1, y1);
  const double v = (1 - fy) * ((1 - fx) * v00 + fx * v10) +
                   fy * ((1 - fx) * v01 + fx * v11);
  out.r = v - v1;
  out.gx = (1 - fy) * (v10 - v00) + fy * (v11 - v01);
  out.gy = (1 - fx) * (v01 - v00) + fx * (v11 - v10);
  return true;
}

}  // namespace

DataTermResult data_term(const AffineTransform& h, const SliceSet& set,
                         const Image& i1, const Image& i2) {
  if (set.pairs.empty())
    raise(ErrorCode::invalid_argument, "slice set is empty");

  double total = 0.0;
  long long m = 0;
  for (const auto& pair : set.pairs) {
    const Rect& r = pair.rect1;
    double partial = 0.0;
    for (int y = r.y0; y < r.y1(); ++y) {
      // Row-incremental warp: q advances by (a1, a2) per unit x.
      double qx = h.a1 * r.x0 + h.b1 * y + h.c1;
      double qy = h.a2 * r.x0 + h.b2 * y + h.c2;
      for (int x = r.x0; x < r.x1(); ++x, qx += h.a1, qy += h.a2) {
        Sample s;
        if (!warped_sample(i2, qx, qy, i1.at(x, y), s)) continue;
        partial += s.r * s.r;
        ++m;
      }
    }
    total += partial;
  }
  if (m == 0)
    raise(ErrorCode::empty_support,
          "transform maps every slice outside image 2");
  return {total / (double)m, m};
}

double regularizer(const AffineTransform& h, const AffineTransform& h0) {
  const auto a = h.coeffs();
  const auto b = h0.coeffs();
  double acc = 0.0;
  for (int i = 0; i < 6; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double objective(const AffineTransform& h, const AffineTransform& h0,
                 const SliceSet& set, const Image& i1, const Image& i2,
                 const ObjectiveConfig& cfg) {
  return data_term(h, set, i1, i2).value + cfg.lambda * regularizer(h, h0);
}

std::array<double, 6> gradient(const AffineTransform& h,
                               const AffineTransform& h0, const SliceSet& set,
                               const Image& i1, const Image& i2,
                               const ObjectiveConfig& cfg) {
  if (set.pairs.empty())
    raise(ErrorCode::invalid_argument, "slice set is empty");

  std::array<double, 6> g{};
  long long m = 0;
  for (const auto& pair : set.pairs) {
    const Rect& r = pair.rect1;
    std::array<double, 6> partial{};
    for (int y = r.y0; y < r.y1(); ++y) {
      double qx = h.a1 * r.x0 + h.b1 * y + h.c1;
      double qy = h.a2 * r.x0 + h.b2 * y + h.c2;
      for (int x = r.x0; x < r.x1(); ++x, qx += h.a1, qy += h.a2) {
        Sample s;
        if (!warped_sample(i2, qx, qy, i1.at(x, y), s)) continue;
        const double rx = s.r * s.gx;
        const double ry = s.r * s.gy;
        partial[0] += rx * x;
        partial[1] += rx * y;
        partial[2] += rx;
        partial[3] += ry * x;
        partial[4] += ry * y;
        partial[5] += ry;
        ++m;
      }
    }
    for (int i = 0; i < 6; ++i) g[i] += partial[i];
  }
  if (m == 0)
    raise(ErrorCode::empty_support,
          "transform maps every slice outside image 2");

  const double scale = 2.0 / (double)m;
  const auto a = h.coeffs();
  const auto b = h0.coeffs();
  for (int i = 0; i < 6; ++i)
    g[i] = g[i] * scale + 2.0 * cfg.lambda * (a[i] - b[i]);
  return g;
}

double direct_objective(const AffineTransform& h, const Image& i1,
                        const Image& i2) {
  double total = 0.0;
  long long m = 0;
  for (int y = 0; y < i1.height(); ++y) {
    for (int x = 0; x < i1.width(); ++x) {
      const auto v = sample_bilinear(
          i2, apply_transform(h, {(double)x, (double)y}));
      if (!v) continue;
      const double r = *v - i1.at(x, y);
      total += r * r;
      ++m;
    }
  }
  if (m == 0)
    raise(ErrorCode::empty_support, "transform maps image 1 outside image 2");
  return total / (double)m;
}

RegistrationResult solve(const AffineTransform& h0, const SliceSet& set,
                         const Image& i1, const Image& i2,
                         const ObjectiveConfig& cfg) {
  if (cfg.max_generation < 1)
    raise(ErrorCode::invalid_argument, "max generation must be >= 1");
  const auto start = std::chrono::steady_clock::now();

  // Work in u = (a1, b1, c1/s, a2, b2, c2/s) so translation and linear
  // coefficients share one step size; s is the largest image dimension.
  const double s = std::max({i1.width(), i1.height(), i2.width(), i2.height()});
  auto to_u = [&](const AffineTransform& h) {
    return std::array<double, 6>{h.a1, h.b1, h.c1 / s, h.a2, h.b2, h.c2 / s};
  };
  auto from_u = [&](const std::array<double, 6>& u) {
    return AffineTransform{u[0], u[1], u[2] * s, u[3], u[4], u[5] * s};
  };

  RegistrationResult res;
  res.h0 = h0;
  res.h = h0;

  auto record = [&](int gen, const AffineTransform& h) {
    const DataTermResult d = data_term(h, set, i1, i2);
    const double reg = regularizer(h, h0);
    res.m = d.m;
    res.trace.push_back({gen, d.value + cfg.lambda * reg, d.value, reg, h});
    return d.value + cfg.lambda * reg;
  };

  double current = record(0, res.h);
  std::array<double, 6> u = to_u(res.h);
  double eta = 0.0;

  for (int gen = 1; gen <= cfg.max_generation; ++gen) {
    std::array<double, 6> g = gradient(res.h, h0, set, i1, i2, cfg);
    std::array<double, 6> gu{g[0], g[1], g[2] * s, g[3], g[4], g[5] * s};
    double gnorm = 0.0;
    for (double v : gu) gnorm = std::max(gnorm, std::abs(v));
    if (gnorm < 1e-15) break;

    if (eta <= 0.0)
      eta = cfg.step_init / gnorm;
    else
      eta = std::min(eta * cfg.step_growth, cfg.step_init * 1e6 / gnorm);

    auto try_step = [&](double step, AffineTransform& h_out) {
      std::array<double, 6> ut = u;
      for (int i = 0; i < 6; ++i) ut[i] -= step * gu[i];
      h_out = from_u(ut);
      try {
        return objective(h_out, h0, set, i1, i2, cfg);
      } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
      }
    };

    double step = eta;
    AffineTransform h_new;
    double f_new = std::numeric_limits<double>::infinity();
    bool found = false;
    for (int halving = 0; halving <= cfg.max_halvings; ++halving) {
      f_new = try_step(step, h_new);
      if (f_new < current) {
        found = true;
        break;
      }
      step *= 0.5;
    }
    if (!found) {
      res.line_search_failed = true;
      break;
    }
    // Probe the two shorter steps as well; taking the best of the three
    // keeps each generation near the one-dimensional minimizer.
    for (double shorter : {step * 0.5, step * 0.25}) {
      AffineTransform h_probe;
      const double f_probe = try_step(shorter, h_probe);
      if (f_probe < f_new) {
        f_new = f_probe;
        h_new = h_probe;
        step = shorter;
      }
    }

    double delta = 0.0;
    const auto before = res.h.coeffs();
    const auto after = h_new.coeffs();
    for (int i = 0; i < 6; ++i)
      delta = std::max(delta, std::abs(after[i] - before[i]));

    res.h = h_new;
    u = to_u(res.h);
    current = record(gen, res.h);
    res.generations = gen;
    eta = step;
    if (delta < cfg.tolerance) break;
  }

  res.elapsed_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return res;
}

std::string trace_to_csv(const std::vector<TraceEntry>& trace) {
  std::string out =
      "generation,objective,data_term,regularizer,a1,b1,c1,a2,b2,c2\n";
  char buf[512];
  for (const auto& e : trace) {
    const auto c = e.h.coeffs();
    std::snprintf(buf, sizeof buf,
                  "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  e.generation, e.objective, e.data_term, e.regularizer, c[0],
                  c[1], c[2], c[3], c[4], c[5]);
    out += buf;
  }
  return out;
}

}  // namespace fao
