#include "fao/fao.h"

#include <chrono>
#include <cstring>
#include <sstream>
#include <string>

#include "fao/core.hpp"
#include "fao/drs.hpp"
#include "fao/evaluation.hpp"
#include "fao/features.hpp"
#include "fao/imaging.hpp"
#include "fao/optimizer.hpp"
#include "fao/pipeline.hpp"

struct fao_image {
  fao::Image img;
};

struct fao_features {
  std::vector<fao::Feature> features;
};

struct fao_drs_result {
  fao::DrsOutput out;
  double elapsed_ms = 0.0;
};

struct fao_registration {
  fao::RegistrationResult res;
};

namespace {

thread_local std::string g_last_error;

fao_status status_of(fao::ErrorCode code) {
  using EC = fao::ErrorCode;
  switch (code) {
    case EC::invalid_argument: return FAO_ERR_INVALID_ARGUMENT;
    case EC::io: return FAO_ERR_IO;
    case EC::malformed_file: return FAO_ERR_MALFORMED_FILE;
    case EC::unsupported_format: return FAO_ERR_UNSUPPORTED_FORMAT;
    case EC::rate_too_high: return FAO_ERR_RATE_TOO_HIGH;
    case EC::image_too_small: return FAO_ERR_IMAGE_TOO_SMALL;
    case EC::too_few_matches: return FAO_ERR_TOO_FEW_MATCHES;
    case EC::no_consensus: return FAO_ERR_NO_CONSENSUS;
    case EC::degenerate_configuration: return FAO_ERR_DEGENERATE;
    case EC::constraint_unsatisfiable: return FAO_ERR_CONSTRAINT_UNSATISFIABLE;
    case EC::empty_support: return FAO_ERR_EMPTY_SUPPORT;
    case EC::singular_transform: return FAO_ERR_SINGULAR_TRANSFORM;
    case EC::insufficient_overlap: return FAO_ERR_INSUFFICIENT_OVERLAP;
    case EC::flat_image: return FAO_ERR_FLAT_IMAGE;
    case EC::no_pairs: return FAO_ERR_NO_PAIRS;
    case EC::internal: return FAO_ERR_INTERNAL;
  }
  return FAO_ERR_INTERNAL;
}

template <typename Fn>
fao_status guarded(Fn&& fn) {
  try {
    fn();
    return FAO_OK;
  } catch (const fao::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FAO_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return FAO_ERR_INTERNAL;
  }
}

fao_status fail_arg(const char* message) {
  g_last_error = message;
  return FAO_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

fao::AffineTransform from_c(const fao_transform& h) {
  return {h.a1, h.b1, h.c1, h.a2, h.b2, h.c2};
}

fao_transform to_c(const fao::AffineTransform& h) {
  return {h.a1, h.b1, h.c1, h.a2, h.b2, h.c2};
}

fao::PipelineConfig config_of(const fao_params& p) {
  fao::PipelineConfig cfg;
  cfg.rate = p.rate;
  cfg.proportion = p.proportion;
  cfg.lambda = p.lambda;
  cfg.max_generation = p.max_generation;
  cfg.ratio = p.ratio;
  cfg.ransac_iterations = p.ransac_iterations;
  cfg.ransac_tau = p.ransac_tau;
  cfg.ransac_min_inliers = p.ransac_min_inliers;
  cfg.seed = p.seed;
  cfg.slice_size = p.slice_size;
  return cfg;
}

fao::ControlGrid grid_of(const double* quads, int count) {
  if (!quads || count < 1)
    fao::raise(fao::ErrorCode::invalid_argument, "control grid is empty");
  fao::ControlGrid grid;
  grid.points.reserve(count);
  for (int i = 0; i < count; ++i)
    grid.points.push_back(
        {quads[4 * i], quads[4 * i + 1], quads[4 * i + 2], quads[4 * i + 3]});
  return grid;
}

const std::vector<fao::Feature>* drs_side(const fao_drs_result* r, int which) {
  if (!r) return nullptr;
  if (which == 1) return &r->out.features1;
  if (which == 2) return &r->out.features2;
  return nullptr;
}

}  // namespace

extern "C" {

const char* fao_status_name(fao_status status) {
  switch (status) {
    case FAO_OK: return "ok";
    case FAO_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case FAO_ERR_IO: return "io";
    case FAO_ERR_MALFORMED_FILE: return "malformed-file";
    case FAO_ERR_UNSUPPORTED_FORMAT: return "unsupported-format";
    case FAO_ERR_RATE_TOO_HIGH: return "rate-too-high";
    case FAO_ERR_IMAGE_TOO_SMALL: return "image-too-small";
    case FAO_ERR_TOO_FEW_MATCHES: return "too-few-matches";
    case FAO_ERR_NO_CONSENSUS: return "no-consensus";
    case FAO_ERR_DEGENERATE: return "degenerate-configuration";
    case FAO_ERR_CONSTRAINT_UNSATISFIABLE: return "constraint-unsatisfiable";
    case FAO_ERR_EMPTY_SUPPORT: return "empty-support";
    case FAO_ERR_SINGULAR_TRANSFORM: return "singular-transform";
    case FAO_ERR_INSUFFICIENT_OVERLAP: return "insufficient-overlap";
    case FAO_ERR_FLAT_IMAGE: return "flat-image";
    case FAO_ERR_NO_PAIRS: return "no-pairs";
    case FAO_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* fao_last_error_message(void) { return g_last_error.c_str(); }

const char* fao_version(void) { return "0.1.0"; }

fao_transform fao_transform_identity(void) {
  return to_c(fao::AffineTransform::identity());
}

void fao_transform_apply(const fao_transform* h, double x, double y,
                         double* out_x, double* out_y) {
  const fao::Point p = fao::apply_transform(from_c(*h), {x, y});
  if (out_x) *out_x = p.x;
  if (out_y) *out_y = p.y;
}

fao_status fao_transform_invert(const fao_transform* h, fao_transform* out) {
  if (!h || !out) return fail_arg("null transform");
  return guarded([&] { *out = to_c(fao::invert(from_c(*h))); });
}

void fao_transform_compose(const fao_transform* h2, const fao_transform* h1,
                           fao_transform* out) {
  *out = to_c(fao::compose(from_c(*h2), from_c(*h1)));
}

fao_status fao_transform_to_json(const fao_transform* h, char** out) {
  if (!h || !out) return fail_arg("null argument");
  return guarded([&] { *out = dup_string(fao::transform_to_json(from_c(*h))); });
}

fao_status fao_transform_from_json(const char* text, fao_transform* out) {
  if (!text || !out) return fail_arg("null argument");
  return guarded([&] { *out = to_c(fao::transform_from_json(text)); });
}

void fao_string_free(char* s) { delete[] s; }
void fao_buffer_free(double* p) { delete[] p; }

fao_status fao_image_load(const char* path, fao_image** out) {
  if (!path || !out) return fail_arg("null argument");
  return guarded([&] { *out = new fao_image{fao::load_image(path)}; });
}

fao_status fao_image_save(const fao_image* img, const char* path) {
  if (!img || !path) return fail_arg("null argument");
  return guarded([&] { fao::save_image(img->img, path); });
}

fao_status fao_image_create(int width, int height, const float* data,
                            int bit_depth, fao_image** out) {
  if (!data || !out) return fail_arg("null argument");
  if (bit_depth != 0 && bit_depth != 8 && bit_depth != 16)
    return fail_arg("bit depth must be 0, 8, or 16");
  return guarded([&] {
    fao::Image img(width, height);
    img.bit_depth = bit_depth;
    std::memcpy(img.pixels().data(), data,
                sizeof(float) * (size_t)width * height);
    *out = new fao_image{std::move(img)};
  });
}

void fao_image_free(fao_image* img) { delete img; }

int fao_image_width(const fao_image* img) { return img ? img->img.width() : 0; }
int fao_image_height(const fao_image* img) {
  return img ? img->img.height() : 0;
}
const float* fao_image_pixels(const fao_image* img) {
  return img ? img->img.pixels().data() : nullptr;
}

fao_status fao_image_downsample(const fao_image* img, int factor,
                                int enforce_min_scale, fao_image** out) {
  if (!img || !out) return fail_arg("null argument");
  return guarded([&] {
    *out = new fao_image{
        fao::downsample(img->img, factor, enforce_min_scale != 0)};
  });
}

fao_status fao_synth_pair(const fao_image* source, const fao_transform* truth,
                          int looks, uint64_t seed, fao_image** out_i1,
                          fao_image** out_i2) {
  if (!source || !truth || !out_i1 || !out_i2) return fail_arg("null argument");
  return guarded([&] {
    fao::SynthSpec spec;
    spec.source = source->img;
    spec.truth = from_c(*truth);
    spec.looks = looks;
    spec.seed = seed;
    fao::SynthPair pair = fao::synth_pair(spec);
    *out_i1 = new fao_image{std::move(pair.i1)};
    *out_i2 = new fao_image{std::move(pair.i2)};
  });
}

void fao_params_init(fao_params* params) {
  if (!params) return;
  const fao::PipelineConfig def;
  params->rate = def.rate;
  params->proportion = def.proportion;
  params->lambda = def.lambda;
  params->max_generation = def.max_generation;
  params->ratio = def.ratio;
  params->ransac_iterations = def.ransac_iterations;
  params->ransac_tau = def.ransac_tau;
  params->ransac_min_inliers = def.ransac_min_inliers;
  params->seed = def.seed;
  params->slice_size = def.slice_size;
}

fao_status fao_detect(const fao_image* img, fao_features** out) {
  if (!img || !out) return fail_arg("null argument");
  return guarded(
      [&] { *out = new fao_features{fao::detect_and_describe(img->img)}; });
}

int fao_features_count(const fao_features* f) {
  return f ? (int)f->features.size() : 0;
}

fao_status fao_features_get(const fao_features* f, int index, double* x,
                            double* y, double* sigma, double* theta,
                            float descriptor[128]) {
  if (!f || index < 0 || index >= (int)f->features.size())
    return fail_arg("feature index out of range");
  const fao::Feature& feat = f->features[index];
  if (x) *x = feat.x;
  if (y) *y = feat.y;
  if (sigma) *sigma = feat.sigma;
  if (theta) *theta = feat.theta;
  if (descriptor)
    std::memcpy(descriptor, feat.descriptor.data(), sizeof(float) * 128);
  return FAO_OK;
}

void fao_features_free(fao_features* f) { delete f; }

fao_status fao_drs_run(const fao_image* i1, const fao_image* i2,
                       const fao_params* params, fao_drs_result** out) {
  if (!i1 || !i2 || !params || !out) return fail_arg("null argument");
  return guarded([&] {
    const auto t0 = std::chrono::steady_clock::now();
    fao::DrsOutput res = fao::run_drs(i1->img, i2->img, config_of(*params).drs());
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    *out = new fao_drs_result{std::move(res), ms};
  });
}

int fao_drs_feature_count(const fao_drs_result* r, int which) {
  const auto* side = drs_side(r, which);
  return side ? (int)side->size() : 0;
}

fao_status fao_drs_feature_get(const fao_drs_result* r, int which, int index,
                               double* x, double* y, double* sigma,
                               double* theta, float descriptor[128]) {
  const auto* side = drs_side(r, which);
  if (!side || index < 0 || index >= (int)side->size())
    return fail_arg("feature index out of range");
  const fao::Feature& feat = (*side)[index];
  if (x) *x = feat.x;
  if (y) *y = feat.y;
  if (sigma) *sigma = feat.sigma;
  if (theta) *theta = feat.theta;
  if (descriptor)
    std::memcpy(descriptor, feat.descriptor.data(), sizeof(float) * 128);
  return FAO_OK;
}

int fao_drs_low_res_match_count(const fao_drs_result* r) {
  return r ? (int)r->out.low_res_matches.size() : 0;
}

int fao_drs_square_count(const fao_drs_result* r, int which) {
  if (!r) return 0;
  if (which == 1) return (int)r->out.squares1.size();
  if (which == 2) return (int)r->out.squares2.size();
  return 0;
}

double fao_drs_elapsed_ms(const fao_drs_result* r) {
  return r ? r->elapsed_ms : 0.0;
}

void fao_drs_result_free(fao_drs_result* r) { delete r; }

fao_status fao_register_pair(const fao_image* i1, const fao_image* i2,
                             const fao_params* params, fao_registration** out) {
  if (!i1 || !i2 || !params || !out) return fail_arg("null argument");
  return guarded([&] {
    *out = new fao_registration{
        fao::register_pair(i1->img, i2->img, config_of(*params))};
  });
}

void fao_registration_transform(const fao_registration* r, fao_transform* out) {
  if (r && out) *out = to_c(r->res.h);
}

void fao_registration_initialization(const fao_registration* r,
                                     fao_transform* out) {
  if (r && out) *out = to_c(r->res.h0);
}

int fao_registration_generations(const fao_registration* r) {
  return r ? r->res.generations : 0;
}

int fao_registration_trace_length(const fao_registration* r) {
  return r ? (int)r->res.trace.size() : 0;
}

fao_status fao_registration_trace_get(const fao_registration* r, int index,
                                      fao_trace_row* out) {
  if (!r || !out || index < 0 || index >= (int)r->res.trace.size())
    return fail_arg("trace index out of range");
  const fao::TraceEntry& e = r->res.trace[index];
  out->generation = e.generation;
  out->objective = e.objective;
  out->data_term = e.data_term;
  out->regularizer = e.regularizer;
  out->h = to_c(e.h);
  return FAO_OK;
}

fao_status fao_registration_trace_csv(const fao_registration* r, char** out) {
  if (!r || !out) return fail_arg("null argument");
  return guarded([&] { *out = dup_string(fao::trace_to_csv(r->res.trace)); });
}

long long fao_registration_sample_count(const fao_registration* r) {
  return r ? r->res.m : 0;
}

double fao_registration_elapsed_ms(const fao_registration* r) {
  return r ? r->res.elapsed_ms : 0.0;
}

int fao_registration_line_search_failed(const fao_registration* r) {
  return r && r->res.line_search_failed ? 1 : 0;
}

void fao_registration_free(fao_registration* r) { delete r; }

fao_status fao_control_grid_make(int width, int height, int nx, int ny,
                                 const fao_transform* truth, double** out_quads,
                                 int* out_count) {
  if (!truth || !out_quads || !out_count) return fail_arg("null argument");
  return guarded([&] {
    const fao::ControlGrid grid =
        fao::make_control_grid(width, height, nx, ny, from_c(*truth));
    double* quads = new double[grid.points.size() * 4];
    for (size_t i = 0; i < grid.points.size(); ++i)
      for (int k = 0; k < 4; ++k) quads[4 * i + k] = grid.points[i][k];
    *out_quads = quads;
    *out_count = (int)grid.points.size();
  });
}

fao_status fao_rmse(const fao_transform* h, const double* quads, int count,
                    double* out) {
  if (!h || !out) return fail_arg("null argument");
  return guarded([&] { *out = fao::rmse(from_c(*h), grid_of(quads, count)); });
}

fao_status fao_ncc_register(const fao_image* i1, const fao_image* i2,
                            int window, fao_transform* out, double* out_peak) {
  if (!i1 || !i2 || !out) return fail_arg("null argument");
  return guarded([&] {
    const fao::NccResult res = fao::ncc_register(i1->img, i2->img, window);
    *out = to_c(res.transform);
    if (out_peak) *out_peak = res.peak;
  });
}

fao_status fao_render_overlay(const fao_image* i1, const fao_image* i2,
                              const fao_transform* h, fao_image** out) {
  if (!i1 || !i2 || !h || !out) return fail_arg("null argument");
  return guarded([&] {
    *out = new fao_image{fao::render_overlay(i1->img, i2->img, from_c(*h))};
  });
}

fao_status fao_experiment_run(const fao_experiment_spec* spec, char** out_csv,
                              char** out_json) {
  if (!spec || !spec->image1 || !spec->image2) return fail_arg("null argument");
  return guarded([&] {
    fao::ExperimentSpec s;
    switch (spec->kind) {
      case FAO_EXPERIMENT_GENERATION_SWEEP:
        s.kind = fao::ExperimentKind::generation_sweep;
        break;
      case FAO_EXPERIMENT_PROPORTION_SWEEP:
        s.kind = fao::ExperimentKind::proportion_sweep;
        break;
      case FAO_EXPERIMENT_RATE_SWEEP:
        s.kind = fao::ExperimentKind::rate_sweep;
        break;
      case FAO_EXPERIMENT_METHOD_COMPARE:
        s.kind = fao::ExperimentKind::method_compare;
        break;
      default:
        fao::raise(fao::ErrorCode::invalid_argument, "unknown experiment kind");
    }
    if (spec->values && spec->n_values > 0)
      s.values.assign(spec->values, spec->values + spec->n_values);
    if (spec->methods) {
      std::stringstream ss(spec->methods);
      std::string token;
      while (std::getline(ss, token, ','))
        if (!token.empty()) s.methods.push_back(token);
    }
    s.base = config_of(spec->params);
    s.image1 = &spec->image1->img;
    s.image2 = &spec->image2->img;
    fao::ControlGrid grid;
    if (spec->grid_quads && spec->grid_count > 0) {
      grid = grid_of(spec->grid_quads, spec->grid_count);
      s.grid = &grid;
    }
    s.ncc_window = spec->ncc_window > 0 ? spec->ncc_window : 64;
    const fao::ExperimentReport rep = fao::run_experiment(s);
    if (out_csv) *out_csv = dup_string(rep.csv());
    if (out_json) *out_json = dup_string(rep.json_summary());
  });
}

}  // extern "C"
