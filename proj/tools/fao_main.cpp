// Command-line front end for the FAO registration library. Everything here
// goes through the C API in fao/fao.h; the heavy lifting lives in libfao.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "fao/fao.h"

namespace {

// Process exit codes. The first eight are fixed interface; later ones cover
// the remaining error classes.
enum ExitCode {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitIo = 3,
  kExitRate = 4,
  kExitMatches = 5,
  kExitConstraint = 6,
  kExitEmptySupport = 7,
  kExitOverlap = 8,
  kExitFlatImage = 9,
  kExitNoPairs = 10,
  kExitSingular = 11,
};

int exit_code_of(fao_status status) {
  switch (status) {
    case FAO_OK: return kExitOk;
    case FAO_ERR_INVALID_ARGUMENT: return kExitUsage;
    case FAO_ERR_IO:
    case FAO_ERR_MALFORMED_FILE:
    case FAO_ERR_UNSUPPORTED_FORMAT: return kExitIo;
    case FAO_ERR_RATE_TOO_HIGH:
    case FAO_ERR_IMAGE_TOO_SMALL: return kExitRate;
    case FAO_ERR_TOO_FEW_MATCHES:
    case FAO_ERR_NO_CONSENSUS:
    case FAO_ERR_DEGENERATE: return kExitMatches;
    case FAO_ERR_CONSTRAINT_UNSATISFIABLE: return kExitConstraint;
    case FAO_ERR_EMPTY_SUPPORT: return kExitEmptySupport;
    case FAO_ERR_INSUFFICIENT_OVERLAP: return kExitOverlap;
    case FAO_ERR_FLAT_IMAGE: return kExitFlatImage;
    case FAO_ERR_NO_PAIRS: return kExitNoPairs;
    case FAO_ERR_SINGULAR_TRANSFORM: return kExitSingular;
    case FAO_ERR_INTERNAL: return kExitInternal;
  }
  return kExitInternal;
}

// One machine-parsable diagnostic line per failure.
[[nodiscard]] int fail(fao_status status) {
  std::fprintf(stderr, "fao: error: %s: %s\n", fao_status_name(status),
               fao_last_error_message());
  return exit_code_of(status);
}

[[nodiscard]] int fail_usage(const std::string& message) {
  std::fprintf(stderr, "fao: error: usage: %s\n", message.c_str());
  return kExitUsage;
}

[[nodiscard]] int fail_io(const std::string& message) {
  std::fprintf(stderr, "fao: error: io: %s\n", message.c_str());
  return kExitIo;
}

struct ImageHandle {
  fao_image* ptr = nullptr;
  ~ImageHandle() { fao_image_free(ptr); }
};

struct StringHandle {
  char* ptr = nullptr;
  ~StringHandle() { fao_string_free(ptr); }
};

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return false;
  out << content;
  return out.good();
}

bool read_file(const std::string& path, std::string& content) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  content = ss.str();
  return true;
}

// Pipeline parameter resolution: command-line flag > config file > default.
struct ParamOptions {
  CLI::Option* rate = nullptr;
  CLI::Option* proportion = nullptr;
  CLI::Option* lambda = nullptr;
  CLI::Option* max_gen = nullptr;
  CLI::Option* ratio = nullptr;
  CLI::Option* ransac_iters = nullptr;
  CLI::Option* ransac_tau = nullptr;
  CLI::Option* ransac_min_inliers = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* slice_size = nullptr;

  int rate_v = 0;
  double proportion_v = 0;
  double lambda_v = 0;
  int max_gen_v = 0;
  double ratio_v = 0;
  int ransac_iters_v = 0;
  double ransac_tau_v = 0;
  int ransac_min_inliers_v = 0;
  uint64_t seed_v = 0;
  int slice_size_v = 0;
  std::string config_path;

  void attach(CLI::App* cmd) {
    rate = cmd->add_option("--rate", rate_v, "Downsampling denominator N");
    proportion = cmd->add_option("--proportion", proportion_v,
                                 "Slice coverage target, e.g. 0.05");
    lambda = cmd->add_option("--lambda", lambda_v, "Regularization weight");
    max_gen = cmd->add_option("--max-gen", max_gen_v, "Optimizer iteration cap");
    ratio = cmd->add_option("--ratio", ratio_v, "Matcher ratio threshold");
    ransac_iters =
        cmd->add_option("--ransac-iters", ransac_iters_v, "RANSAC iterations");
    ransac_tau = cmd->add_option("--ransac-tau", ransac_tau_v,
                                 "RANSAC inlier threshold, px");
    ransac_min_inliers = cmd->add_option("--ransac-min-inliers",
                                         ransac_min_inliers_v,
                                         "RANSAC minimum consensus size");
    seed = cmd->add_option("--seed", seed_v, "Run seed");
    slice_size =
        cmd->add_option("--slice-size", slice_size_v, "Nominal slice side, px");
    cmd->add_option("--config", config_path,
                    "JSON config file (flag > file > default)");
  }

  // Returns false (after printing) when the config file is unusable.
  bool resolve(fao_params& params, int& error_exit) {
    fao_params_init(&params);
    if (!config_path.empty()) {
      std::string text;
      if (!read_file(config_path, text)) {
        error_exit = fail_io("cannot read config " + config_path);
        return false;
      }
      nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
      if (j.is_discarded() || !j.is_object()) {
        error_exit = fail_io("config is not a JSON object: " + config_path);
        return false;
      }
      try {
        if (j.contains("rate")) params.rate = j["rate"].get<int>();
        if (j.contains("proportion"))
          params.proportion = j["proportion"].get<double>();
        if (j.contains("lambda")) params.lambda = j["lambda"].get<double>();
        if (j.contains("max_generation"))
          params.max_generation = j["max_generation"].get<int>();
        if (j.contains("ratio")) params.ratio = j["ratio"].get<double>();
        if (j.contains("ransac_iterations"))
          params.ransac_iterations = j["ransac_iterations"].get<int>();
        if (j.contains("ransac_tau"))
          params.ransac_tau = j["ransac_tau"].get<double>();
        if (j.contains("ransac_min_inliers"))
          params.ransac_min_inliers = j["ransac_min_inliers"].get<int>();
        if (j.contains("seed")) params.seed = j["seed"].get<uint64_t>();
        if (j.contains("slice_size"))
          params.slice_size = j["slice_size"].get<int>();
      } catch (const nlohmann::json::exception& e) {
        error_exit = fail_io("bad config value in " + config_path + ": " + e.what());
        return false;
      }
    }
    if (rate->count()) params.rate = rate_v;
    if (proportion->count()) params.proportion = proportion_v;
    if (lambda->count()) params.lambda = lambda_v;
    if (max_gen->count()) params.max_generation = max_gen_v;
    if (ratio->count()) params.ratio = ratio_v;
    if (ransac_iters->count()) params.ransac_iterations = ransac_iters_v;
    if (ransac_tau->count()) params.ransac_tau = ransac_tau_v;
    if (ransac_min_inliers->count())
      params.ransac_min_inliers = ransac_min_inliers_v;
    if (seed->count()) params.seed = seed_v;
    if (slice_size->count()) params.slice_size = slice_size_v;
    return true;
  }
};

std::string params_to_json(const fao_params& p) {
  nlohmann::ordered_json j;
  j["rate"] = p.rate;
  j["proportion"] = p.proportion;
  j["lambda"] = p.lambda;
  j["max_generation"] = p.max_generation;
  j["ratio"] = p.ratio;
  j["ransac_iterations"] = p.ransac_iterations;
  j["ransac_tau"] = p.ransac_tau;
  j["ransac_min_inliers"] = p.ransac_min_inliers;
  j["seed"] = p.seed;
  j["slice_size"] = p.slice_size;
  return j.dump();
}

int load_image_or_fail(const std::string& path, ImageHandle& out) {
  const fao_status st = fao_image_load(path.c_str(), &out.ptr);
  if (st != FAO_OK) return fail(st);
  return kExitOk;
}

std::string format_features(const fao_drs_result* drs, const fao_features* plain,
                            int which) {
  std::string out;
  char buf[64];
  const int n = drs ? fao_drs_feature_count(drs, which)
                    : fao_features_count(plain);
  float desc[128];
  for (int i = 0; i < n; ++i) {
    double x, y, sigma, theta;
    if (drs)
      fao_drs_feature_get(drs, which, i, &x, &y, &sigma, &theta, desc);
    else
      fao_features_get(plain, i, &x, &y, &sigma, &theta, desc);
    std::snprintf(buf, sizeof buf, "%.4f %.4f %.4f %.6f", x, y, sigma, theta);
    out += buf;
    for (int k = 0; k < 128; ++k) {
      std::snprintf(buf, sizeof buf, " %.6f", desc[k]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

// ---- subcommands ----

int cmd_register(const std::string& fixed, const std::string& moving,
                 const std::string& out_path, const std::string& trace_path,
                 const std::string& overlay_path, const fao_params& params,
                 bool print_config) {
  if (print_config) {
    std::printf("%s\n", params_to_json(params).c_str());
    return kExitOk;
  }
  ImageHandle i1, i2;
  if (int rc = load_image_or_fail(fixed, i1)) return rc;
  if (int rc = load_image_or_fail(moving, i2)) return rc;

  fao_registration* reg = nullptr;
  fao_status st = fao_register_pair(i1.ptr, i2.ptr, &params, &reg);
  if (st != FAO_OK) return fail(st);
  std::unique_ptr<fao_registration, decltype(&fao_registration_free)> guard(
      reg, &fao_registration_free);

  fao_transform h;
  fao_registration_transform(reg, &h);
  StringHandle json;
  if ((st = fao_transform_to_json(&h, &json.ptr)) != FAO_OK) return fail(st);
  if (!write_file(out_path, std::string(json.ptr) + "\n"))
    return fail_io("cannot write " + out_path);

  if (!trace_path.empty()) {
    StringHandle csv;
    if ((st = fao_registration_trace_csv(reg, &csv.ptr)) != FAO_OK)
      return fail(st);
    if (!write_file(trace_path, csv.ptr))
      return fail_io("cannot write " + trace_path);
  }
  if (!overlay_path.empty()) {
    ImageHandle overlay;
    if ((st = fao_render_overlay(i1.ptr, i2.ptr, &h, &overlay.ptr)) != FAO_OK)
      return fail(st);
    if ((st = fao_image_save(overlay.ptr, overlay_path.c_str())) != FAO_OK)
      return fail(st);
  }

  fao_transform h0;
  fao_registration_initialization(reg, &h0);
  std::printf("generations=%d samples=%lld elapsed_ms=%.1f\n",
              fao_registration_generations(reg),
              fao_registration_sample_count(reg),
              fao_registration_elapsed_ms(reg));
  return kExitOk;
}

int cmd_synth(const std::string& source, const std::string& truth_path,
              const std::string& out_dir, int looks, uint64_t seed) {
  ImageHandle src;
  if (int rc = load_image_or_fail(source, src)) return rc;

  std::string truth_text;
  if (!read_file(truth_path, truth_text))
    return fail_io("cannot read " + truth_path);
  fao_transform truth;
  fao_status st = fao_transform_from_json(truth_text.c_str(), &truth);
  if (st != FAO_OK) return fail(st);

  ImageHandle i1, i2;
  if ((st = fao_synth_pair(src.ptr, &truth, looks, seed, &i1.ptr, &i2.ptr)) !=
      FAO_OK)
    return fail(st);

  if ((st = fao_image_save(i1.ptr, (out_dir + "/i1.f32").c_str())) != FAO_OK)
    return fail(st);
  if ((st = fao_image_save(i2.ptr, (out_dir + "/i2.f32").c_str())) != FAO_OK)
    return fail(st);

  StringHandle json;
  if ((st = fao_transform_to_json(&truth, &json.ptr)) != FAO_OK) return fail(st);
  if (!write_file(out_dir + "/truth.json", std::string(json.ptr) + "\n"))
    return fail_io("cannot write " + out_dir + "/truth.json");

  double* quads = nullptr;
  int count = 0;
  if ((st = fao_control_grid_make(fao_image_width(src.ptr),
                                  fao_image_height(src.ptr), 20, 20, &truth,
                                  &quads, &count)) != FAO_OK)
    return fail(st);
  std::string grid_csv;
  char buf[256];
  for (int i = 0; i < count; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", quads[4 * i],
                  quads[4 * i + 1], quads[4 * i + 2], quads[4 * i + 3]);
    grid_csv += buf;
  }
  fao_buffer_free(quads);
  if (!write_file(out_dir + "/grid.csv", grid_csv))
    return fail_io("cannot write " + out_dir + "/grid.csv");
  std::printf("wrote i1.f32 i2.f32 truth.json grid.csv to %s\n",
              out_dir.c_str());
  return kExitOk;
}

bool parse_grid_csv(const std::string& text, std::vector<double>& quads) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    double x1, y1, x2, y2;
    char extra;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf %c", &x1, &y1, &x2, &y2,
                    &extra) != 4)
      return false;
    quads.insert(quads.end(), {x1, y1, x2, y2});
  }
  return !quads.empty();
}

int cmd_eval(const std::string& transform_path, const std::string& grid_path) {
  std::string text;
  if (!read_file(transform_path, text))
    return fail_io("cannot read " + transform_path);
  fao_transform h;
  fao_status st = fao_transform_from_json(text.c_str(), &h);
  if (st != FAO_OK) return fail(st);

  std::string grid_text;
  if (!read_file(grid_path, grid_text))
    return fail_io("cannot read " + grid_path);
  std::vector<double> quads;
  if (!parse_grid_csv(grid_text, quads))
    return fail_io("bad tie-point file " + grid_path);

  double value = 0.0;
  if ((st = fao_rmse(&h, quads.data(), (int)quads.size() / 4, &value)) != FAO_OK)
    return fail(st);
  std::printf("rmse_px=%.17g\n", value);
  return kExitOk;
}

int cmd_features(const std::string& img1_path, const std::string& img2_path,
                 bool use_drs, const std::string& out_path,
                 const std::string& summary_path,
                 const std::vector<int>& sweep_rates,
                 const std::string& sweep_out, const fao_params& params) {
  ImageHandle i1;
  if (int rc = load_image_or_fail(img1_path, i1)) return rc;
  ImageHandle i2;
  if (use_drs || !sweep_rates.empty()) {
    const std::string second = img2_path.empty() ? img1_path : img2_path;
    if (int rc = load_image_or_fail(second, i2)) return rc;
  }

  if (!sweep_rates.empty()) {
    std::vector<double> values(sweep_rates.begin(), sweep_rates.end());
    fao_experiment_spec spec{};
    spec.kind = FAO_EXPERIMENT_RATE_SWEEP;
    spec.values = values.data();
    spec.n_values = (int)values.size();
    spec.params = params;
    spec.image1 = i1.ptr;
    spec.image2 = i2.ptr;
    StringHandle csv, json;
    const fao_status st = fao_experiment_run(&spec, &csv.ptr, &json.ptr);
    if (st != FAO_OK) return fail(st);
    if (!sweep_out.empty()) {
      if (!write_file(sweep_out, csv.ptr))
        return fail_io("cannot write " + sweep_out);
    } else {
      std::printf("%s", csv.ptr);
    }
    if (!summary_path.empty() && !write_file(summary_path, json.ptr))
      return fail_io("cannot write " + summary_path);
    return kExitOk;
  }

  if (use_drs) {
    fao_drs_result* drs = nullptr;
    fao_status st = fao_drs_run(i1.ptr, i2.ptr, &params, &drs);
    if (st != FAO_OK) return fail(st);
    std::unique_ptr<fao_drs_result, decltype(&fao_drs_result_free)> guard(
        drs, &fao_drs_result_free);
    const std::string dump =
        format_features(drs, nullptr, 1) + format_features(drs, nullptr, 2);
    if (!out_path.empty() && !write_file(out_path, dump))
      return fail_io("cannot write " + out_path);
    nlohmann::ordered_json j;
    j["n_lowres_matches"] = fao_drs_low_res_match_count(drs);
    j["n_squares"] =
        fao_drs_square_count(drs, 1) + fao_drs_square_count(drs, 2);
    j["n_features_1"] = fao_drs_feature_count(drs, 1);
    j["n_features_2"] = fao_drs_feature_count(drs, 2);
    j["elapsed_ms"] = fao_drs_elapsed_ms(drs);
    const std::string summary = j.dump();
    if (!summary_path.empty()) {
      if (!write_file(summary_path, summary + "\n"))
        return fail_io("cannot write " + summary_path);
    } else {
      std::printf("%s\n", summary.c_str());
    }
    return kExitOk;
  }

  fao_features* feats = nullptr;
  fao_status st = fao_detect(i1.ptr, &feats);
  if (st != FAO_OK) return fail(st);
  std::unique_ptr<fao_features, decltype(&fao_features_free)> guard(
      feats, &fao_features_free);
  const std::string dump = format_features(nullptr, feats, 0);
  if (!out_path.empty() && !write_file(out_path, dump))
    return fail_io("cannot write " + out_path);
  nlohmann::ordered_json j;
  j["n_features"] = fao_features_count(feats);
  const std::string summary = j.dump();
  if (!summary_path.empty()) {
    if (!write_file(summary_path, summary + "\n"))
      return fail_io("cannot write " + summary_path);
  } else {
    std::printf("%s\n", summary.c_str());
  }
  return kExitOk;
}

int cmd_compare(const std::string& img1_path, const std::string& img2_path,
                const std::string& grid_path, const std::string& methods,
                const std::string& sweep, const std::vector<double>& values,
                const std::string& out_path, const std::string& summary_path,
                int ncc_window, const fao_params& params) {
  ImageHandle i1, i2;
  if (int rc = load_image_or_fail(img1_path, i1)) return rc;
  if (int rc = load_image_or_fail(img2_path, i2)) return rc;

  std::string grid_text;
  if (!read_file(grid_path, grid_text))
    return fail_io("cannot read " + grid_path);
  std::vector<double> quads;
  if (!parse_grid_csv(grid_text, quads))
    return fail_io("bad tie-point file " + grid_path);

  fao_experiment_spec spec{};
  if (sweep.empty()) {
    spec.kind = FAO_EXPERIMENT_METHOD_COMPARE;
    spec.methods = methods.c_str();
  } else if (sweep == "generation") {
    spec.kind = FAO_EXPERIMENT_GENERATION_SWEEP;
  } else if (sweep == "proportion") {
    spec.kind = FAO_EXPERIMENT_PROPORTION_SWEEP;
  } else {
    return fail_usage("unknown sweep kind: " + sweep);
  }
  spec.values = values.empty() ? nullptr : values.data();
  spec.n_values = (int)values.size();
  spec.params = params;
  spec.image1 = i1.ptr;
  spec.image2 = i2.ptr;
  spec.grid_quads = quads.data();
  spec.grid_count = (int)quads.size() / 4;
  spec.ncc_window = ncc_window;

  StringHandle csv, json;
  const fao_status st = fao_experiment_run(&spec, &csv.ptr, &json.ptr);
  if (st != FAO_OK) return fail(st);
  if (!out_path.empty()) {
    if (!write_file(out_path, csv.ptr)) return fail_io("cannot write " + out_path);
  } else {
    std::printf("%s", csv.ptr);
  }
  if (!summary_path.empty() && !write_file(summary_path, json.ptr))
    return fail_io("cannot write " + summary_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feature-area optimization for SAR image registration"};
  app.require_subcommand(1);

  // register
  auto* reg = app.add_subcommand("register",
                                 "Register a moving image onto a fixed image");
  std::string reg_fixed, reg_moving, reg_out = "transform.json";
  std::string reg_trace, reg_overlay;
  bool reg_print_config = false;
  reg->add_option("fixed", reg_fixed, "Fixed image (image 1)")->required();
  reg->add_option("moving", reg_moving, "Moving image (image 2)")->required();
  reg->add_option("--out", reg_out, "Output transform JSON path");
  reg->add_option("--trace", reg_trace, "Write the objective trace CSV here");
  reg->add_option("--overlay", reg_overlay, "Write a fused overlay image here");
  reg->add_flag("--print-config", reg_print_config,
                "Print the resolved configuration and exit");
  ParamOptions reg_params;
  reg_params.attach(reg);

  // synth
  auto* synth = app.add_subcommand("synth", "Build a speckled synthetic pair");
  std::string synth_source, synth_truth, synth_out;
  int synth_looks = 1;
  uint64_t synth_seed = 0;
  synth->add_option("source", synth_source, "Source image")->required();
  synth->add_option("truth", synth_truth, "Ground-truth transform JSON")
      ->required();
  synth->add_option("outdir", synth_out, "Output directory (must exist)")
      ->required();
  synth->add_option("--looks", synth_looks, "Speckle looks (>= 1)");
  synth->add_option("--seed", synth_seed, "Noise seed");

  // eval
  auto* eval = app.add_subcommand("eval", "Control-grid RMSE of a transform");
  std::string eval_transform, eval_grid;
  eval->add_option("transform", eval_transform, "Transform JSON")->required();
  eval->add_option("grid", eval_grid, "Tie-point CSV: x1,y1,x2,y2")->required();

  // features
  auto* features = app.add_subcommand("features", "Extract and dump features");
  std::string feat_img1, feat_img2, feat_out, feat_summary, feat_sweep_out;
  bool feat_sift = false, feat_drs = false;
  std::vector<int> feat_sweep;
  features->add_option("image1", feat_img1, "Input image")->required();
  features->add_option("image2", feat_img2,
                       "Second image (dual-resolution mode)");
  features->add_flag("--sift", feat_sift, "Plain full-image detection");
  features->add_flag("--drs", feat_drs, "Dual-resolution pipeline");
  features->add_option("--out", feat_out, "Feature dump path");
  features->add_option("--summary", feat_summary, "Summary JSON path");
  features->add_option("--sweep", feat_sweep,
                       "Rate sweep, e.g. --sweep 4 8 16")
      ->delimiter(',');
  features->add_option("--sweep-out", feat_sweep_out, "Rate sweep CSV path");
  ParamOptions feat_params;
  feat_params.attach(features);

  // compare
  auto* compare =
      app.add_subcommand("compare", "Compare methods or sweep a parameter");
  std::string cmp_img1, cmp_img2, cmp_grid, cmp_methods = "fao,ncc";
  std::string cmp_sweep, cmp_out, cmp_summary;
  std::vector<double> cmp_values;
  int cmp_window = 64;
  compare->add_option("image1", cmp_img1, "Fixed image")->required();
  compare->add_option("image2", cmp_img2, "Moving image")->required();
  compare->add_option("--grid", cmp_grid, "Tie-point CSV for RMSE")->required();
  compare->add_option("--methods", cmp_methods, "Comma list: fao,ncc");
  compare->add_option("--sweep", cmp_sweep,
                      "Sweep instead: generation | proportion");
  compare->add_option("--values", cmp_values, "Sweep values")->delimiter(',');
  compare->add_option("--ncc-window", cmp_window, "NCC search window, px");
  compare->add_option("--out", cmp_out, "Result CSV path");
  compare->add_option("--summary", cmp_summary, "Summary JSON path");
  ParamOptions cmp_params;
  cmp_params.attach(compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::fprintf(stderr, "fao: error: usage: %s\n", e.what());
    return kExitUsage;
  }

  if (reg->parsed()) {
    fao_params params;
    int rc = 0;
    if (!reg_params.resolve(params, rc)) return rc;
    return cmd_register(reg_fixed, reg_moving, reg_out, reg_trace, reg_overlay,
                        params, reg_print_config);
  }
  if (synth->parsed())
    return cmd_synth(synth_source, synth_truth, synth_out, synth_looks,
                     synth_seed);
  if (eval->parsed()) return cmd_eval(eval_transform, eval_grid);
  if (features->parsed()) {
    if (feat_sift && feat_drs)
      return fail_usage("--sift and --drs are mutually exclusive");
    fao_params params;
    int rc = 0;
    if (!feat_params.resolve(params, rc)) return rc;
    return cmd_features(feat_img1, feat_img2, feat_drs, feat_out, feat_summary,
                        feat_sweep, feat_sweep_out, params);
  }
  if (compare->parsed()) {
    fao_params params;
    int rc = 0;
    if (!cmp_params.resolve(params, rc)) return rc;
    return cmd_compare(cmp_img1, cmp_img2, cmp_grid, cmp_methods, cmp_sweep,
                       cmp_values, cmp_out, cmp_summary, cmp_window, params);
  }
  return fail_usage("no subcommand given");
}
