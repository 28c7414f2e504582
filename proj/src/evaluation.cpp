#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

#include "fao/evaluation.hpp"
#include "fao/sliceset.hpp"

namespace fao {

ControlGrid make_control_grid(int width, int height, int nx, int ny,
                              const AffineTransform& truth) {
  if (width < 1 || height < 1 || nx < 1 || ny < 1)
    raise(ErrorCode::invalid_argument, "bad control grid dimensions");
  ControlGrid grid;
  grid.points.reserve((size_t)nx * ny);
  for (int iy = 1; iy <= ny; ++iy) {
    for (int ix = 1; ix <= nx; ++ix) {
      const double x = (double)width * ix / (nx + 1);
      const double y = (double)height * iy / (ny + 1);
      const Point q = apply_transform(truth, {x, y});
      grid.points.push_back({x, y, q.x, q.y});
    }
  }
  return grid;
}

double rmse(const AffineTransform& h, const ControlGrid& grid) {
  if (grid.points.empty())
    raise(ErrorCode::invalid_argument, "control grid is empty");
  double acc = 0.0;
  for (const auto& p : grid.points) {
    const Point q = apply_transform(h, {p[0], p[1]});
    const double dx = q.x - p[2];
    const double dy = q.y - p[3];
    acc += dx * dx + dy * dy;
  }
  return std::sqrt(acc / (double)grid.points.size());
}

std::string control_grid_to_csv(const ControlGrid& grid) {
  std::string out;
  char buf[256];
  for (const auto& p : grid.points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", p[0], p[1],
                  p[2], p[3]);
    out += buf;
  }
  return out;
}

ControlGrid control_grid_from_csv(const std::string& text) {
  ControlGrid grid;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::array<double, 4> p;
    char extra;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf %c", &p[0], &p[1], &p[2],
                    &p[3], &extra) != 4)
      raise(ErrorCode::malformed_file, "bad tie-point line: " + line);
    grid.points.push_back(p);
  }
  if (grid.points.empty())
    raise(ErrorCode::malformed_file, "tie-point file has no points");
  return grid;
}

FeatureErrorStats feature_error(const std::vector<Feature>& a,
                                const std::vector<Feature>& b, double radius) {
  if (a.empty() || b.empty())
    raise(ErrorCode::invalid_argument, "feature sets must be nonempty");

  // Candidate pairs within the radius, via a uniform grid over b.
  const double cell = std::max(1.0, radius);
  auto key = [&](double x, double y) {
    return std::make_pair((long long)std::floor(x / cell),
                          (long long)std::floor(y / cell));
  };
  std::map<std::pair<long long, long long>, std::vector<int>> buckets;
  for (int j = 0; j < (int)b.size(); ++j)
    buckets[key(b[j].x, b[j].y)].push_back(j);

  struct Cand {
    double d;
    int i, j;
  };
  std::vector<Cand> cands;
  for (int i = 0; i < (int)a.size(); ++i) {
    const auto center = key(a[i].x, a[i].y);
    for (long long gx = center.first - 1; gx <= center.first + 1; ++gx) {
      for (long long gy = center.second - 1; gy <= center.second + 1; ++gy) {
        auto it = buckets.find({gx, gy});
        if (it == buckets.end()) continue;
        for (int j : it->second) {
          const double dx = a[i].x - b[j].x;
          const double dy = a[i].y - b[j].y;
          const double d = std::sqrt(dx * dx + dy * dy);
          if (d <= radius) cands.push_back({d, i, j});
        }
      }
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& l, const Cand& r) {
    if (l.d != r.d) return l.d < r.d;
    if (l.i != r.i) return l.i < r.i;
    return l.j < r.j;
  });

  std::vector<bool> used_a(a.size(), false), used_b(b.size(), false);
  FeatureErrorStats stats;
  double sum = 0.0, sum_sq = 0.0;
  for (const Cand& c : cands) {
    if (used_a[c.i] || used_b[c.j]) continue;
    used_a[c.i] = true;
    used_b[c.j] = true;
    sum += c.d;
    sum_sq += c.d * c.d;
    ++stats.paired;
  }
  if (stats.paired == 0)
    raise(ErrorCode::no_pairs, "no feature pairs within the pairing radius");
  stats.mean_px = sum / stats.paired;
  stats.mean_sq_px = sum_sq / stats.paired;
  stats.unpaired_a = (int)a.size() - stats.paired;
  stats.unpaired_b = (int)b.size() - stats.paired;
  return stats;
}

NccResult ncc_register(const Image& i1, const Image& i2, int window) {
  if (window < 1)
    raise(ErrorCode::invalid_argument, "search window must be >= 1");
  const int w = std::min(i1.width(), i2.width());
  const int h = std::min(i1.height(), i2.height());
  const int tside = std::min(256, std::min(w, h) - 2 * window);
  if (tside < 16)
    raise(ErrorCode::invalid_argument,
          "images too small for the requested search window");

  const int tx0 = (i1.width() - tside) / 2;
  const int ty0 = (i1.height() - tside) / 2;
  const long long n = (long long)tside * tside;

  double tmean = 0.0;
  for (int y = 0; y < tside; ++y)
    for (int x = 0; x < tside; ++x) tmean += i1.at(tx0 + x, ty0 + y);
  tmean /= (double)n;
  double tvar = 0.0;
  for (int y = 0; y < tside; ++y)
    for (int x = 0; x < tside; ++x) {
      const double d = i1.at(tx0 + x, ty0 + y) - tmean;
      tvar += d * d;
    }
  if (tvar <= 1e-12) raise(ErrorCode::flat_image, "template has zero variance");
  const double tnorm = std::sqrt(tvar);

  // Integral images over i2 for per-shift patch means and variances.
  const int w2 = i2.width(), h2 = i2.height();
  std::vector<double> s1((size_t)(w2 + 1) * (h2 + 1), 0.0);
  std::vector<double> s2((size_t)(w2 + 1) * (h2 + 1), 0.0);
  for (int y = 0; y < h2; ++y) {
    double row1 = 0.0, row2 = 0.0;
    for (int x = 0; x < w2; ++x) {
      const double v = i2.at(x, y);
      row1 += v;
      row2 += v * v;
      s1[(size_t)(y + 1) * (w2 + 1) + x + 1] =
          s1[(size_t)y * (w2 + 1) + x + 1] + row1;
      s2[(size_t)(y + 1) * (w2 + 1) + x + 1] =
          s2[(size_t)y * (w2 + 1) + x + 1] + row2;
    }
  }
  auto box = [&](const std::vector<double>& s, int x0, int y0, int x1, int y1) {
    return s[(size_t)y1 * (w2 + 1) + x1] - s[(size_t)y0 * (w2 + 1) + x1] -
           s[(size_t)y1 * (w2 + 1) + x0] + s[(size_t)y0 * (w2 + 1) + x0];
  };

  NccResult best;
  best.peak = -2.0;
  bool any = false;
  for (int dy = -window; dy <= window; ++dy) {
    const int py0 = ty0 + dy;
    if (py0 < 0 || py0 + tside > h2) continue;
    for (int dx = -window; dx <= window; ++dx) {
      const int px0 = tx0 + dx;
      if (px0 < 0 || px0 + tside > w2) continue;

      const double psum = box(s1, px0, py0, px0 + tside, py0 + tside);
      const double psum2 = box(s2, px0, py0, px0 + tside, py0 + tside);
      const double pmean = psum / (double)n;
      const double pvar = psum2 - psum * pmean;
      if (pvar <= 1e-12) continue;

      double dot = 0.0;
      for (int y = 0; y < tside; ++y)
        for (int x = 0; x < tside; ++x)
          dot += (double)i1.at(tx0 + x, ty0 + y) * i2.at(px0 + x, py0 + y);
      const double num = dot - tmean * psum;
      const double ncc =
          std::clamp(num / (tnorm * std::sqrt(pvar)), -1.0, 1.0);
      if (ncc > best.peak) {
        best.peak = ncc;
        best.dx = dx;
        best.dy = dy;
        any = true;
      }
    }
  }
  if (!any)
    raise(ErrorCode::flat_image, "every candidate patch has zero variance");
  best.transform = AffineTransform::translation(best.dx, best.dy);
  return best;
}

Image render_overlay(const Image& i1, const Image& i2,
                     const AffineTransform& h) {
  const AffineTransform hinv = invert(h);

  double min_x = 0.0, min_y = 0.0;
  double max_x = i1.width() - 1.0, max_y = i1.height() - 1.0;
  const Point corners[4] = {{0, 0},
                            {(double)i2.width() - 1, 0},
                            {(double)i2.width() - 1, (double)i2.height() - 1},
                            {0, (double)i2.height() - 1}};
  for (const Point& c : corners) {
    const Point p = apply_transform(hinv, c);
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  const int off_x = (int)std::floor(min_x);
  const int off_y = (int)std::floor(min_y);
  const int cw = (int)std::ceil(max_x) - off_x + 1;
  const int ch = (int)std::ceil(max_y) - off_y + 1;

  Image out(cw, ch);
  for (int y = 0; y < ch; ++y) {
    for (int x = 0; x < cw; ++x) {
      const int ix = x + off_x, iy = y + off_y;
      const bool in1 =
          ix >= 0 && ix < i1.width() && iy >= 0 && iy < i1.height();
      const auto v2 =
          sample_bilinear(i2, apply_transform(h, {(double)ix, (double)iy}));
      if (in1 && v2) {
        const double v = 0.5 * (i1.at(ix, iy) + *v2) + 0.25;
        out.at(x, y) = (float)std::clamp(v, 0.0, 1.0);
      } else if (in1) {
        out.at(x, y) = i1.at(ix, iy);
      } else if (v2) {
        out.at(x, y) = (float)*v2;
      }
    }
  }
  return out;
}

std::string ExperimentReport::csv() const {
  std::string out = "label";
  for (const auto& c : columns) out += "," + c;
  out += "\n";
  char buf[64];
  for (size_t r = 0; r < rows.size(); ++r) {
    out += labels[r];
    for (double v : rows[r]) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

std::string ExperimentReport::json_summary() const {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (size_t r = 0; r < rows.size(); ++r) {
    nlohmann::ordered_json row;
    row["label"] = labels[r];
    for (size_t c = 0; c < columns.size(); ++c) row[columns[c]] = rows[r][c];
    arr.push_back(row);
  }
  return arr.dump();
}

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct PipelineFront {
  DrsOutput drs;
  std::vector<PointMatch> pairs;
  RansacResult init;
  std::vector<SlicePair> candidates;
};

PipelineFront run_front(const Image& i1, const Image& i2,
                        const PipelineConfig& cfg) {
  PipelineFront f;
  f.drs = run_drs(i1, i2, cfg.drs());
  const auto matches = match_features(f.drs.features1, f.drs.features2, cfg.ratio);
  if (matches.size() < 3)
    raise(ErrorCode::too_few_matches, "too few matches for initialization");
  f.pairs = to_point_matches(f.drs.features1, f.drs.features2, matches);
  f.init = ransac_affine(f.pairs, cfg.ransac());
  f.candidates =
      build_candidates(f.pairs, f.init.inliers, i1, i2, cfg.slice_size);
  return f;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  if (!spec.image1 || !spec.image2)
    raise(ErrorCode::invalid_argument, "experiment needs two images");
  const Image& i1 = *spec.image1;
  const Image& i2 = *spec.image2;
  ExperimentReport rep;
  char label[64];

  switch (spec.kind) {
    case ExperimentKind::generation_sweep: {
      if (!spec.grid)
        raise(ErrorCode::invalid_argument, "generation sweep needs a grid");
      if (spec.values.empty())
        raise(ErrorCode::invalid_argument, "generation sweep needs values");
      rep.columns = {"generation", "solve_ms", "rmse_px", "objective"};
      const PipelineFront f = run_front(i1, i2, spec.base);
      const SliceSet set =
          select(f.candidates, spec.base.proportion, f.init.transform, i1, i2,
                 mix_seed(spec.base.seed, 0x5));
      for (double v : spec.values) {
        ObjectiveConfig oc = spec.base.objective();
        oc.max_generation = std::max(1, (int)std::lround(v));
        const double t0 = now_ms();
        const RegistrationResult res = solve(f.init.transform, set, i1, i2, oc);
        const double ms = now_ms() - t0;
        std::snprintf(label, sizeof label, "gen_%d", oc.max_generation);
        rep.labels.push_back(label);
        rep.rows.push_back({(double)oc.max_generation, ms,
                            rmse(res.h, *spec.grid),
                            res.trace.back().objective});
      }
      break;
    }
    case ExperimentKind::proportion_sweep: {
      if (!spec.grid)
        raise(ErrorCode::invalid_argument, "proportion sweep needs a grid");
      if (spec.values.empty())
        raise(ErrorCode::invalid_argument, "proportion sweep needs values");
      rep.columns = {"proportion", "solve_ms", "rmse_px", "n_slices"};
      const PipelineFront f = run_front(i1, i2, spec.base);
      for (double target : spec.values) {
        const SliceSet set = select(f.candidates, target, f.init.transform, i1,
                                    i2, mix_seed(spec.base.seed, 0x5));
        const double t0 = now_ms();
        const RegistrationResult res =
            solve(f.init.transform, set, i1, i2, spec.base.objective());
        const double ms = now_ms() - t0;
        std::snprintf(label, sizeof label, "prop_%g", target);
        rep.labels.push_back(label);
        rep.rows.push_back({target, ms, rmse(res.h, *spec.grid),
                            (double)set.pairs.size()});
      }
      break;
    }
    case ExperimentKind::rate_sweep: {
      if (spec.values.empty())
        raise(ErrorCode::invalid_argument, "rate sweep needs values");
      rep.columns = {"rate",    "mean_err_px", "mean_err_sq_px", "drs_ms",
                     "sift_ms", "n_features",  "n_squares"};
      const double t0 = now_ms();
      const auto full = detect_and_describe(i1);
      const double sift_ms = now_ms() - t0;
      for (double v : spec.values) {
        DrsConfig dc = spec.base.drs();
        dc.rate = std::max(1, (int)std::lround(v));
        const double t1 = now_ms();
        const DrsOutput out = run_drs(i1, i2, dc);
        const double drs_ms = now_ms() - t1;
        const FeatureErrorStats err = feature_error(out.features1, full);
        std::snprintf(label, sizeof label, "rate_%d", dc.rate);
        rep.labels.push_back(label);
        rep.rows.push_back({(double)dc.rate, err.mean_px, err.mean_sq_px,
                            drs_ms, sift_ms, (double)out.features1.size(),
                            (double)out.squares1.size()});
      }
      break;
    }
    case ExperimentKind::method_compare: {
      if (!spec.grid)
        raise(ErrorCode::invalid_argument, "method comparison needs a grid");
      if (spec.methods.empty())
        raise(ErrorCode::invalid_argument, "method comparison needs methods");
      rep.columns = {"rmse_px", "elapsed_ms"};
      for (const std::string& method : spec.methods) {
        if (method == "fao") {
          const RegistrationResult res = register_pair(i1, i2, spec.base);
          rep.labels.push_back("fao");
          rep.rows.push_back({rmse(res.h, *spec.grid), res.elapsed_ms});
        } else if (method == "ncc") {
          const double t0 = now_ms();
          const NccResult res = ncc_register(i1, i2, spec.ncc_window);
          const double ms = now_ms() - t0;
          rep.labels.push_back("ncc");
          rep.rows.push_back({rmse(res.transform, *spec.grid), ms});
        } else {
          raise(ErrorCode::invalid_argument, "unknown method: " + method);
        }
      }
      break;
    }
  }
  return rep;
}

}  // namespace fao
