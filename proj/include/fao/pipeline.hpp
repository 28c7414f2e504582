#pragma once

#include <cstdint>

#include "fao/core.hpp"
#include "fao/drs.hpp"
#include "fao/initializer.hpp"
#include "fao/optimizer.hpp"

namespace fao {

/// End-to-end configuration. Defaults follow the recommended operating
/// point: rate 1:4, 5% coverage, lambda 0.001, 200 generations.
struct PipelineConfig {
  int rate = 4;
  double proportion = 0.05;
  double lambda = 0.001;
  int max_generation = 200;
  double ratio = 0.8;
  int ransac_iterations = 2000;
  double ransac_tau = 2.0;
  int ransac_min_inliers = 8;
  uint64_t seed = 0;
  int slice_size = 256;

  DrsConfig drs() const;
  RansacConfig ransac() const;
  ObjectiveConfig objective() const;
};

struct PipelineSummary {
  int n_low_res_matches = 0;
  int n_squares1 = 0, n_squares2 = 0;
  int n_features1 = 0, n_features2 = 0;
  int n_matches = 0;
  int n_inliers = 0;
  int n_slices = 0;
  double slice_proportion = 0.0;
};

/// Dual-resolution features -> matches -> RANSAC initialization -> slice
/// selection -> regularized area optimization.
RegistrationResult register_pair(const Image& i1, const Image& i2,
                                 const PipelineConfig& cfg,
                                 PipelineSummary* summary = nullptr);

}  // namespace fao
