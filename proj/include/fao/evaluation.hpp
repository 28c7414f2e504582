#pragma once

#include <string>
#include <vector>

#include "fao/core.hpp"
#include "fao/drs.hpp"
#include "fao/features.hpp"
#include "fao/optimizer.hpp"
#include "fao/pipeline.hpp"

namespace fao {

/// Reference point pairs: source positions on image 1 with ground-truth or
/// hand-picked positions on image 2. Stored as (x1, y1, x2, y2).
struct ControlGrid {
  std::vector<std::array<double, 4>> points;
};

/// Regular nx x ny interior lattice on a w x h frame; reference positions
/// come from the given transform.
ControlGrid make_control_grid(int width, int height, int nx, int ny,
                              const AffineTransform& truth);

/// Root-mean-square error in pixels of H over the grid.
double rmse(const AffineTransform& h, const ControlGrid& grid);

std::string control_grid_to_csv(const ControlGrid& grid);
ControlGrid control_grid_from_csv(const std::string& text);

struct FeatureErrorStats {
  double mean_px = 0.0;     // mean paired position error, pixels
  double mean_sq_px = 0.0;  // mean squared position error
  int paired = 0;
  int unpaired_a = 0;
  int unpaired_b = 0;
};

/// Greedy nearest-neighbor pairing within `radius` px between two feature
/// sets; unpaired features are counted, not averaged.
FeatureErrorStats feature_error(const std::vector<Feature>& a,
                                const std::vector<Feature>& b,
                                double radius = 4.0);

struct NccResult {
  AffineTransform transform;  // translation-only
  double peak = 0.0;          // correlation at the best shift, in [-1, 1]
  int dx = 0, dy = 0;
};

/// Exhaustive normalized cross-correlation of a central patch of image 1
/// against image 2 over integer shifts in [-window, window]^2.
NccResult ncc_register(const Image& i1, const Image& i2, int window = 64);

/// Fuse image 2 (warped back by h^-1) over image 1, brightening where both
/// are defined; the canvas covers both footprints.
Image render_overlay(const Image& i1, const Image& i2,
                     const AffineTransform& h);

enum class ExperimentKind {
  generation_sweep,
  proportion_sweep,
  rate_sweep,
  method_compare,
};

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::method_compare;
  std::vector<double> values;        // sweep points (rates, proportions, generations)
  std::vector<std::string> methods;  // for method_compare: "fao", "ncc"
  PipelineConfig base;
  const Image* image1 = nullptr;
  const Image* image2 = nullptr;
  const ControlGrid* grid = nullptr;  // required except for rate sweeps
  int ncc_window = 64;
};

struct ExperimentReport {
  std::vector<std::string> columns;
  std::vector<std::string> labels;  // one per row
  std::vector<std::vector<double>> rows;
  std::string csv() const;
  std::string json_summary() const;
};

/// Run one sweep or comparison over a fixed image pair and report a table.
ExperimentReport run_experiment(const ExperimentSpec& spec);

}  // namespace fao
