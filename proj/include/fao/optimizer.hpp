#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fao/core.hpp"
#include "fao/sliceset.hpp"

namespace fao {

struct ObjectiveConfig {
  double lambda = 0.001;    // weight of the pull toward the initialization
  int max_generation = 200;
  double step_init = 1e-3;  // first-step coefficient change, preconditioned units
  double step_growth = 2.0;
  int max_halvings = 30;
  double tolerance = 1e-8;  // stop when no coefficient moves more than this
};

struct TraceEntry {
  int generation = 0;  // 0 is the starting point
  double objective = 0.0;
  double data_term = 0.0;
  double regularizer = 0.0;
  AffineTransform h;
};

struct DataTermResult {
  double value = 0.0;
  long long m = 0;  // pixels that landed inside image 2
};

/// Mean squared intensity residual over the slice set: image-2 samples at
/// H*p against image-1 values at p, restricted to in-bounds samples.
DataTermResult data_term(const AffineTransform& h, const SliceSet& set,
                         const Image& i1, const Image& i2);

/// Sum of squared differences over the six free coefficients.
double regularizer(const AffineTransform& h, const AffineTransform& h0);

double objective(const AffineTransform& h, const AffineTransform& h0,
                 const SliceSet& set, const Image& i1, const Image& i2,
                 const ObjectiveConfig& cfg);

/// Analytic gradient of the objective in (a1, b1, c1, a2, b2, c2).
std::array<double, 6> gradient(const AffineTransform& h,
                               const AffineTransform& h0, const SliceSet& set,
                               const Image& i1, const Image& i2,
                               const ObjectiveConfig& cfg);

/// The plain whole-image objective, kept as an independent reference: mean
/// squared residual over every pixel of image 1, no slices, no regularizer.
double direct_objective(const AffineTransform& h, const Image& i1,
                        const Image& i2);

struct RegistrationResult {
  AffineTransform h0, h;
  std::vector<TraceEntry> trace;
  long long m = 0;
  double elapsed_ms = 0.0;
  int generations = 0;
  bool line_search_failed = false;
  std::optional<double> rmse_px;  // filled by callers holding a control grid
};

/// Gradient descent from h0 with a backtracking line search; one accepted
/// step per generation. Translation and linear coefficients are diagonally
/// preconditioned so a single step size serves all six.
RegistrationResult solve(const AffineTransform& h0, const SliceSet& set,
                         const Image& i1, const Image& i2,
                         const ObjectiveConfig& cfg);

/// CSV with columns generation, objective, data_term, regularizer, and the
/// six coefficients; full double precision.
std::string trace_to_csv(const std::vector<TraceEntry>& trace);

}  // namespace fao
