/*
 * C interface to the FAO registration library.
 *
 * All objects returned through double pointers are owned by the caller and
 * released with the matching *_free function. Functions returning fao_status
 * report FAO_OK on success; on failure the out-parameters are untouched and
 * fao_last_error_message() describes the problem for the calling thread.
 */
#ifndef FAO_H
#define FAO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FAO_API __declspec(dllexport)
#else
#define FAO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fao_status {
  FAO_OK = 0,
  FAO_ERR_INVALID_ARGUMENT = 1,
  FAO_ERR_IO = 2,
  FAO_ERR_MALFORMED_FILE = 3,
  FAO_ERR_UNSUPPORTED_FORMAT = 4,
  FAO_ERR_RATE_TOO_HIGH = 5,
  FAO_ERR_IMAGE_TOO_SMALL = 6,
  FAO_ERR_TOO_FEW_MATCHES = 7,
  FAO_ERR_NO_CONSENSUS = 8,
  FAO_ERR_DEGENERATE = 9,
  FAO_ERR_CONSTRAINT_UNSATISFIABLE = 10,
  FAO_ERR_EMPTY_SUPPORT = 11,
  FAO_ERR_SINGULAR_TRANSFORM = 12,
  FAO_ERR_INSUFFICIENT_OVERLAP = 13,
  FAO_ERR_FLAT_IMAGE = 14,
  FAO_ERR_NO_PAIRS = 15,
  FAO_ERR_INTERNAL = 16
} fao_status;

FAO_API const char* fao_status_name(fao_status status);
FAO_API const char* fao_last_error_message(void);
FAO_API const char* fao_version(void);

/* ---- transforms ---- */

/* Affine map from image-1 coordinates to image-2 coordinates; the matrix
 * bottom row is an implicit (0, 0, 1). */
typedef struct fao_transform {
  double a1, b1, c1;
  double a2, b2, c2;
} fao_transform;

FAO_API fao_transform fao_transform_identity(void);
FAO_API void fao_transform_apply(const fao_transform* h, double x, double y,
                                 double* out_x, double* out_y);
FAO_API fao_status fao_transform_invert(const fao_transform* h,
                                        fao_transform* out);
FAO_API void fao_transform_compose(const fao_transform* h2,
                                   const fao_transform* h1, fao_transform* out);
/* Flat JSON object {"a1":..,"b1":..,"c1":..,"a2":..,"b2":..,"c2":..}. */
FAO_API fao_status fao_transform_to_json(const fao_transform* h, char** out);
FAO_API fao_status fao_transform_from_json(const char* text, fao_transform* out);

FAO_API void fao_string_free(char* s);
FAO_API void fao_buffer_free(double* p);

/* ---- images ---- */

typedef struct fao_image fao_image;

/* Formats by extension: .png (8/16-bit grayscale), .pgm (binary P5),
 * .f32 (raw little-endian float32 plus "<path>.json" sidecar). */
FAO_API fao_status fao_image_load(const char* path, fao_image** out);
FAO_API fao_status fao_image_save(const fao_image* img, const char* path);
/* bit_depth: 8 or 16 for quantized saves, 0 for float-native data. */
FAO_API fao_status fao_image_create(int width, int height, const float* data,
                                    int bit_depth, fao_image** out);
FAO_API void fao_image_free(fao_image* img);
FAO_API int fao_image_width(const fao_image* img);
FAO_API int fao_image_height(const fao_image* img);
FAO_API const float* fao_image_pixels(const fao_image* img);
FAO_API fao_status fao_image_downsample(const fao_image* img, int factor,
                                        int enforce_min_scale, fao_image** out);

/* Speckled test pair: i1 is the source times unit-mean gamma noise, i2 the
 * warped source times an independent noise field. */
FAO_API fao_status fao_synth_pair(const fao_image* source,
                                  const fao_transform* truth, int looks,
                                  uint64_t seed, fao_image** out_i1,
                                  fao_image** out_i2);

/* ---- pipeline parameters ---- */

typedef struct fao_params {
  int rate;                /* downsampling denominator N */
  double proportion;       /* slice coverage target */
  double lambda;           /* regularization weight */
  int max_generation;      /* optimizer iteration cap */
  double ratio;            /* matcher ratio threshold */
  int ransac_iterations;
  double ransac_tau;       /* inlier threshold, px */
  int ransac_min_inliers;
  uint64_t seed;
  int slice_size;          /* nominal slice side, px */
} fao_params;

FAO_API void fao_params_init(fao_params* params);

/* ---- features ---- */

typedef struct fao_features fao_features;

FAO_API fao_status fao_detect(const fao_image* img, fao_features** out);
FAO_API int fao_features_count(const fao_features* f);
FAO_API fao_status fao_features_get(const fao_features* f, int index,
                                    double* x, double* y, double* sigma,
                                    double* theta, float descriptor[128]);
FAO_API void fao_features_free(fao_features* f);

typedef struct fao_drs_result fao_drs_result;

FAO_API fao_status fao_drs_run(const fao_image* i1, const fao_image* i2,
                               const fao_params* params, fao_drs_result** out);
/* which: 1 or 2, selecting the image side. */
FAO_API int fao_drs_feature_count(const fao_drs_result* r, int which);
FAO_API fao_status fao_drs_feature_get(const fao_drs_result* r, int which,
                                       int index, double* x, double* y,
                                       double* sigma, double* theta,
                                       float descriptor[128]);
FAO_API int fao_drs_low_res_match_count(const fao_drs_result* r);
FAO_API int fao_drs_square_count(const fao_drs_result* r, int which);
FAO_API double fao_drs_elapsed_ms(const fao_drs_result* r);
FAO_API void fao_drs_result_free(fao_drs_result* r);

/* ---- registration ---- */

typedef struct fao_registration fao_registration;

typedef struct fao_trace_row {
  int generation;
  double objective;
  double data_term;
  double regularizer;
  fao_transform h;
} fao_trace_row;

FAO_API fao_status fao_register_pair(const fao_image* i1, const fao_image* i2,
                                     const fao_params* params,
                                     fao_registration** out);
FAO_API void fao_registration_transform(const fao_registration* r,
                                        fao_transform* out);
FAO_API void fao_registration_initialization(const fao_registration* r,
                                             fao_transform* out);
FAO_API int fao_registration_generations(const fao_registration* r);
FAO_API int fao_registration_trace_length(const fao_registration* r);
FAO_API fao_status fao_registration_trace_get(const fao_registration* r,
                                              int index, fao_trace_row* out);
/* CSV with columns generation, objective, data_term, regularizer, a1..c2. */
FAO_API fao_status fao_registration_trace_csv(const fao_registration* r,
                                              char** out);
FAO_API long long fao_registration_sample_count(const fao_registration* r);
FAO_API double fao_registration_elapsed_ms(const fao_registration* r);
FAO_API int fao_registration_line_search_failed(const fao_registration* r);
FAO_API void fao_registration_free(fao_registration* r);

/* ---- evaluation ---- */

/* Control grids travel as n rows of (x1, y1, x2, y2). */
FAO_API fao_status fao_control_grid_make(int width, int height, int nx, int ny,
                                         const fao_transform* truth,
                                         double** out_quads, int* out_count);
FAO_API fao_status fao_rmse(const fao_transform* h, const double* quads,
                            int count, double* out);
FAO_API fao_status fao_ncc_register(const fao_image* i1, const fao_image* i2,
                                    int window, fao_transform* out,
                                    double* out_peak);
FAO_API fao_status fao_render_overlay(const fao_image* i1, const fao_image* i2,
                                      const fao_transform* h, fao_image** out);

/* ---- experiments ---- */

typedef enum fao_experiment_kind {
  FAO_EXPERIMENT_GENERATION_SWEEP = 0,
  FAO_EXPERIMENT_PROPORTION_SWEEP = 1,
  FAO_EXPERIMENT_RATE_SWEEP = 2,
  FAO_EXPERIMENT_METHOD_COMPARE = 3
} fao_experiment_kind;

typedef struct fao_experiment_spec {
  fao_experiment_kind kind;
  const double* values;      /* sweep points; unused for method comparison */
  int n_values;
  const char* methods;       /* comma-separated, e.g. "fao,ncc" */
  fao_params params;
  const fao_image* image1;
  const fao_image* image2;
  const double* grid_quads;  /* may be NULL for rate sweeps */
  int grid_count;
  int ncc_window;
} fao_experiment_spec;

/* Runs the experiment and returns the result table as CSV plus a JSON
 * summary (array of row objects). Either out pointer may be NULL. */
FAO_API fao_status fao_experiment_run(const fao_experiment_spec* spec,
                                      char** out_csv, char** out_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FAO_H */
