#include <chrono>

#include "fao/pipeline.hpp"
#include "fao/sliceset.hpp"

namespace fao {

DrsConfig PipelineConfig::drs() const {
  DrsConfig c;
  c.rate = rate;
  c.ratio = ratio;
  c.seed = mix_seed(seed, 0xd);
  return c;
}

RansacConfig PipelineConfig::ransac() const {
  RansacConfig c;
  c.max_iterations = ransac_iterations;
  c.inlier_threshold = ransac_tau;
  c.min_inliers = ransac_min_inliers;
  c.seed = mix_seed(seed, 0xa);
  return c;
}

ObjectiveConfig PipelineConfig::objective() const {
  ObjectiveConfig c;
  c.lambda = lambda;
  c.max_generation = max_generation;
  return c;
}

RegistrationResult register_pair(const Image& i1, const Image& i2,
                                 const PipelineConfig& cfg,
                                 PipelineSummary* summary) {
  const auto start = std::chrono::steady_clock::now();

  const DrsOutput drs_out = run_drs(i1, i2, cfg.drs());
  const auto matches =
      match_features(drs_out.features1, drs_out.features2, cfg.ratio);
  if (matches.size() < 3)
    raise(ErrorCode::too_few_matches,
          "only " + std::to_string(matches.size()) +
              " original-resolution matches; need at least 3");
  const auto pairs =
      to_point_matches(drs_out.features1, drs_out.features2, matches);

  const RansacResult init = ransac_affine(pairs, cfg.ransac());

  const auto candidates =
      build_candidates(pairs, init.inliers, i1, i2, cfg.slice_size);
  const SliceSet set = select(candidates, cfg.proportion, init.transform, i1,
                              i2, mix_seed(cfg.seed, 0x5));

  RegistrationResult res = solve(init.transform, set, i1, i2, cfg.objective());
  res.elapsed_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();

  if (summary) {
    summary->n_low_res_matches = (int)drs_out.low_res_matches.size();
    summary->n_squares1 = (int)drs_out.squares1.size();
    summary->n_squares2 = (int)drs_out.squares2.size();
    summary->n_features1 = (int)drs_out.features1.size();
    summary->n_features2 = (int)drs_out.features2.size();
    summary->n_matches = (int)matches.size();
    summary->n_inliers = init.inlier_count;
    summary->n_slices = (int)set.pairs.size();
    summary->slice_proportion = set.proportion;
  }
  return res;
}

}  // namespace fao
