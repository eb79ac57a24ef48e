#ifndef PATLA_PATLA_H
#define PATLA_PATLA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(PATLA_BUILDING)
#    define PATLA_API __declspec(dllexport)
#  else
#    define PATLA_API __declspec(dllimport)
#  endif
#else
#  define PATLA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Limited-angle photoacoustic tomography toolkit.
 *
 * Images and data are real row-major double arrays. Axis 0 of an image is the
 * distance from the line sensor (row 0 touches the sensor), axis 1 runs along
 * the sensor. Data arrays are n_t x n_s time series with normalized time c*t.
 * Complex spectra are interleaved (re, im) pairs.
 *
 * Every function returning patla_status leaves a message for
 * patla_last_error() on failure. Handles are owned by the caller and released
 * with the matching *_free function; free functions accept NULL. */

typedef enum patla_status {
    PATLA_OK = 0,
    PATLA_ERR_INVALID_ARGUMENT = 1,
    PATLA_ERR_SHAPE_MISMATCH = 2,
    PATLA_ERR_IO = 3,
    PATLA_ERR_FORMAT = 4,
    PATLA_ERR_NUMERIC = 5,
    PATLA_ERR_INTERNAL = 6
} patla_status;

typedef enum patla_interpolation {
    PATLA_INTERP_LINEAR = 0,
    PATLA_INTERP_CUBIC = 1,
    PATLA_INTERP_QUINTIC = 2
} patla_interpolation;

typedef enum patla_restrict_mode {
    PATLA_RESTRICT_WEDGE_ONLY = 0,
    PATLA_RESTRICT_FULLY = 1
} patla_restrict_mode;

typedef enum patla_channel {
    PATLA_CHANNEL_PLAIN = 0,
    PATLA_CHANNEL_VISIBLE = 1,
    PATLA_CHANNEL_INVISIBLE = 2
} patla_channel;

typedef enum patla_dtype {
    PATLA_F32 = 0,
    PATLA_F64 = 1,
    PATLA_C64 = 2,
    PATLA_C128 = 3
} patla_dtype;

typedef enum patla_entry_kind {
    PATLA_KIND_IMAGE = 0,
    PATLA_KIND_CORONAE_PYRAMID = 1,
    PATLA_KIND_CURVELET_COEFFS = 2,
    PATLA_KIND_DATA = 3
} patla_entry_kind;

typedef struct patla_operator patla_operator;
typedef struct patla_curvelet patla_curvelet;
typedef struct patla_projector patla_projector;
typedef struct patla_coeffs patla_coeffs;
typedef struct patla_coronae patla_coronae;
typedef struct patla_pyramid patla_pyramid;
typedef struct patla_fista_result patla_fista_result;
typedef struct patla_bundle patla_bundle;

PATLA_API const char* patla_version(void);
/* Message of the last failure on the calling thread ("" if none). */
PATLA_API const char* patla_last_error(void);
PATLA_API const char* patla_status_name(patla_status s);

/* ---- Sensitivity wedge ------------------------------------------------- */

/* Data-domain wavefront angle atan(sin(theta)). */
PATLA_API patla_status patla_wavefront_map(double theta, double* beta);

/* ---- Fourier-domain operators ------------------------------------------ */

typedef struct patla_operator_config {
    size_t n_perp;          /* image rows */
    size_t n_s;             /* image columns = sensor count */
    double h_x;             /* pixel size in metres */
    double c;               /* sound speed in m/s */
    size_t n_t;             /* time samples; 0 selects ceil(sqrt(2) * n_perp) */
    double h_t;             /* time step in s; 0 selects h_x / c */
    double theta_max;       /* sensitivity half angle in (0, pi/2) */
    int limited;            /* 0 selects the nearly full view operator */
    size_t oversample;      /* zero padding factor of the spectra, >= 1 */
    patla_interpolation interpolation;
} patla_operator_config;

/* Defaults: 192 x 192, h_x = 1e-4, c = 1500, matched time grid, pi/4, limited,
 * no oversampling, 6-point interpolation. */
PATLA_API void patla_operator_config_default(patla_operator_config* cfg);

PATLA_API patla_status patla_operator_new(const patla_operator_config* cfg, patla_operator** out);
PATLA_API void patla_operator_free(patla_operator* op);

/* Data grid (n_t x n_s), image spectrum and data spectrum dimensions. */
PATLA_API patla_status patla_operator_dims(const patla_operator* op, size_t* n_t, size_t* n_s, size_t* image_spec_rows,
                                           size_t* data_spec_rows);
PATLA_API patla_status patla_operator_max_factor(const patla_operator* op, double* factor, double* bound);

/* Time-space maps: image (n_perp x n_s) <-> data (n_t x n_s). */
PATLA_API patla_status patla_forward(const patla_operator* op, const double* image, double* data);
PATLA_API patla_status patla_adjoint(const patla_operator* op, const double* data, double* image);
PATLA_API patla_status patla_invert(const patla_operator* op, const double* data, double* image);

/* Spectral maps on interleaved complex arrays of image_spec_rows x n_s and
 * data_spec_rows x n_s values. */
PATLA_API patla_status patla_forward_spectrum(const patla_operator* op, const double* p0_spec, double* g_spec);
PATLA_API patla_status patla_adjoint_spectrum(const patla_operator* op, const double* g_spec, double* p0_spec);
PATLA_API patla_status patla_inverse_spectrum(const patla_operator* op, const double* g_spec, double* p0_spec);

/* ---- Curvelet frame ----------------------------------------------------- */

PATLA_API patla_status patla_curvelet_new(size_t rows, size_t cols, size_t n_scales, size_t n_angles,
                                          patla_curvelet** out);
PATLA_API void patla_curvelet_free(patla_curvelet* sys);
/* Wedge count of a scale (1 for the coarse scale). */
PATLA_API patla_status patla_curvelet_angles(const patla_curvelet* sys, size_t scale, size_t* count);

PATLA_API patla_status patla_curvelet_forward(const patla_curvelet* sys, const double* image, patla_coeffs** out);
PATLA_API patla_status patla_curvelet_inverse(const patla_curvelet* sys, const patla_coeffs* c, double* image);
/* Image-domain contribution of a single scale. */
PATLA_API patla_status patla_curvelet_synthesize_scale(const patla_curvelet* sys, const patla_coeffs* c, size_t scale,
                                                       double* image);
PATLA_API patla_status patla_curvelet_zeros(const patla_curvelet* sys, patla_coeffs** out);

/* Coefficients: blocks in layout order, block 0 is the coarse block. */
PATLA_API void patla_coeffs_free(patla_coeffs* c);
PATLA_API patla_status patla_coeffs_clone(const patla_coeffs* c, patla_coeffs** out);
PATLA_API size_t patla_coeffs_size(const patla_coeffs* c);
PATLA_API size_t patla_coeffs_block_count(const patla_coeffs* c);
PATLA_API patla_status patla_coeffs_block_info(const patla_coeffs* c, size_t block, size_t* scale, size_t* wedge,
                                               size_t* rows, size_t* cols, size_t* offset, double* angle);
/* All coefficients, total size values. */
PATLA_API double* patla_coeffs_data(patla_coeffs* c);
PATLA_API const double* patla_coeffs_data_const(const patla_coeffs* c);

/* Projection onto the curvelets oriented within theta_max of the sensor
 * normal. The projector keeps its curvelet system alive. */
PATLA_API patla_status patla_projector_new(const patla_curvelet* sys, double theta_max, patla_restrict_mode mode,
                                           patla_projector** out);
PATLA_API void patla_projector_free(patla_projector* p);
PATLA_API patla_status patla_projector_kept(const patla_projector* p, size_t scale, size_t* kept);
PATLA_API patla_status patla_projector_apply(const patla_projector* p, const patla_coeffs* c, patla_coeffs** out);
PATLA_API patla_status patla_projector_complement(const patla_projector* p, const patla_coeffs* c,
                                                  patla_coeffs** out);
/* Visible and invisible coefficients of an image. */
PATLA_API patla_status patla_projector_split(const patla_projector* p, const double* image, patla_coeffs** visible,
                                             patla_coeffs** invisible);
/* Image of the visible coefficients of c. */
PATLA_API patla_status patla_projector_synthesize(const patla_projector* p, const patla_coeffs* c, double* image);

/* ---- Coronae filter bank ------------------------------------------------ */

PATLA_API patla_status patla_coronae_new(size_t rows, size_t cols, size_t n_scales, patla_coronae** out);
PATLA_API void patla_coronae_free(patla_coronae* f);
/* Band dimensions of a decomposition with the given levels, coarse first;
 * rows and cols must hold levels + 1 values. */
PATLA_API patla_status patla_coronae_dims(const patla_coronae* f, size_t levels, size_t* rows, size_t* cols);
PATLA_API size_t patla_coronae_size_formula(size_t n_finest, size_t depth);

PATLA_API patla_status patla_coronae_decompose(const patla_coronae* f, const double* image, size_t levels,
                                               patla_pyramid** out);
/* Pyramid of the visible or invisible part of an image. */
PATLA_API patla_status patla_coronae_component(const patla_coronae* f, const double* image, double theta_max,
                                               patla_channel which, size_t levels, patla_pyramid** out);
PATLA_API patla_status patla_coronae_reconstruct(const patla_coronae* f, const patla_pyramid* p, double* image);

PATLA_API patla_status patla_pyramid_new(size_t levels, const size_t* rows, const size_t* cols, patla_channel channel,
                                         patla_pyramid** out);
PATLA_API void patla_pyramid_free(patla_pyramid* p);
PATLA_API size_t patla_pyramid_levels(const patla_pyramid* p);
PATLA_API patla_channel patla_pyramid_channel(const patla_pyramid* p);
PATLA_API patla_status patla_pyramid_band_dims(const patla_pyramid* p, size_t band, size_t* rows, size_t* cols);
PATLA_API double* patla_pyramid_band(patla_pyramid* p, size_t band);
PATLA_API const double* patla_pyramid_band_const(const patla_pyramid* p, size_t band);

/* ---- Visible reconstruction --------------------------------------------- */

typedef struct patla_fista_config {
    double tau;               /* l1 weight */
    size_t max_iters;
    double eta;               /* relative iterate change tolerance */
    double lipschitz;         /* 0 estimates it by power iteration */
    double lipschitz_margin;  /* multiplier on the estimate */
    size_t power_iters;
    uint64_t seed;
} patla_fista_config;

/* tau 2.5e-4, 50 iterations, eta 1e-6, estimated Lipschitz constant. */
PATLA_API void patla_fista_config_default(patla_fista_config* cfg);

/* Minimizes 1/2 ||A P* f - g||^2 + tau ||W f||_1 over visible coefficients f
 * for time-space data g (n_t x n_s). */
PATLA_API patla_status patla_fista(const patla_operator* op, const patla_projector* p, const double* data,
                                   const patla_fista_config* cfg, patla_fista_result** out);
PATLA_API void patla_fista_result_free(patla_fista_result* r);
PATLA_API const patla_coeffs* patla_fista_coeffs(const patla_fista_result* r);
PATLA_API double patla_fista_lipschitz(const patla_fista_result* r);
PATLA_API size_t patla_fista_iterations(const patla_fista_result* r);
/* Objective trace: row k holds the values at the k-th iterate. */
PATLA_API size_t patla_fista_trace_length(const patla_fista_result* r);
PATLA_API patla_status patla_fista_trace_row(const patla_fista_result* r, size_t row, double* fidelity,
                                             double* penalty, double* total);
PATLA_API patla_status patla_fista_write_trace(const patla_fista_result* r, const char* path);

/* ---- Phantoms, noise and metrics ---------------------------------------- */

PATLA_API patla_status patla_phantom_ellipses(uint64_t seed, size_t rows, size_t cols, double* image,
                                              size_t* ellipse_count);
PATLA_API patla_status patla_phantom_disks(size_t n, double* image);
/* count images of n x n, written consecutively. */
PATLA_API patla_status patla_phantom_vessels(const char* source_dir, size_t count, uint64_t seed, size_t n,
                                             double* images);
PATLA_API patla_status patla_add_white_noise(double* values, size_t count, double sigma, uint64_t seed);
PATLA_API patla_status patla_metrics(const double* rec, const double* ref, size_t rows, size_t cols, double* mse,
                                     double* psnr, double* ssim);
/* 8-bit min-max scaled grayscale PNG (lossy preview). */
PATLA_API patla_status patla_write_png(const char* path, const double* image, size_t rows, size_t cols);

/* ---- Coefficient bundles ------------------------------------------------ */

PATLA_API patla_status patla_bundle_new(patla_bundle** out);
PATLA_API patla_status patla_bundle_read(const char* path, patla_bundle** out);
/* Atomic: writes a temporary directory and renames it into place. */
PATLA_API patla_status patla_bundle_write(const patla_bundle* b, const char* path);
PATLA_API void patla_bundle_free(patla_bundle* b);

/* Attribute value as JSON text, e.g. "0.785" or "\"ellipses\"". */
PATLA_API patla_status patla_bundle_set_attribute(patla_bundle* b, const char* key, const char* json_value);
/* Copies the JSON text of an attribute into buf (NUL terminated); *needed
 * receives the required size including the terminator. */
PATLA_API patla_status patla_bundle_get_attribute(const patla_bundle* b, const char* key, char* buf, size_t size,
                                                  size_t* needed);

PATLA_API size_t patla_bundle_entry_count(const patla_bundle* b);
PATLA_API const char* patla_bundle_entry_name(const patla_bundle* b, size_t index);
PATLA_API patla_status patla_bundle_entry_info(const patla_bundle* b, const char* name, patla_entry_kind* kind,
                                               patla_dtype* dtype, size_t* rows, size_t* cols);

/* Real 2D entries (image or data kind) stored as f32 or f64. */
PATLA_API patla_status patla_bundle_add_array(patla_bundle* b, const char* name, patla_entry_kind kind,
                                              patla_dtype dtype, const double* values, size_t rows, size_t cols);
PATLA_API patla_status patla_bundle_get_array(const patla_bundle* b, const char* name, double* values, size_t rows,
                                              size_t cols);

/* Pyramids as <prefix>/scale<k>, curvelet blocks as <prefix>/s<scale>/w<wedge>. */
PATLA_API patla_status patla_bundle_add_pyramid(patla_bundle* b, const char* prefix, const patla_pyramid* p,
                                                patla_dtype dtype);
PATLA_API patla_status patla_bundle_get_pyramid(const patla_bundle* b, const char* prefix, patla_pyramid** out);
PATLA_API patla_status patla_bundle_add_coeffs(patla_bundle* b, const char* prefix, const patla_coeffs* c);
PATLA_API patla_status patla_bundle_get_coeffs(const patla_bundle* b, const char* prefix, const patla_curvelet* sys,
                                               patla_coeffs** out);

#ifdef __cplusplus
}
#endif

#endif
