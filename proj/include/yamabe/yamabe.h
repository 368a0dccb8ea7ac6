/* C interface to the yamabe flow library.
 *
 * All functions returning yb_status leave a human-readable message in
 * yb_last_error() (per thread) when they fail. Objects are opaque and owned
 * by the caller once returned; release them with the matching *_free.
 */
#ifndef YAMABE_YAMABE_H
#define YAMABE_YAMABE_H

#include <stddef.h>
#include <stdint.h>

#if defined(YAMABE_BUILDING_LIBRARY)
#define YB_API __attribute__((visibility("default")))
#else
#define YB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as CLI exit codes. */
typedef enum yb_status {
  YB_OK = 0,
  YB_ERR_VALIDATION = 1,
  YB_ERR_NUMERICAL = 2,
  YB_ERR_IO = 3,
  YB_ERR_INTERNAL = 4
} yb_status;

typedef struct yb_config yb_config;
typedef struct yb_grid yb_grid;
typedef struct yb_field yb_field;
typedef struct yb_run yb_run;
typedef struct yb_sequence yb_sequence;
typedef struct yb_family yb_family;

/* One trajectory row; same columns as the CSV output. */
typedef struct yb_record {
  double t;
  double dt;
  double u_min;
  double u_max;
  double vol_g;
  double R_min;
  double R_max;
  double R_l1;
  double vol_identity_residual;
  double evoR_residual_l2;
  double lp_dist_initial;
  double lp_dist_flat;
  double moser_ratio;
} yb_record;

typedef struct yb_member_summary {
  int index;
  double delta;
  double amplitude;
  double calibrated_min_R;
  double final_flat_distance;
  double final_R_sup;
  double volume_drift;
  double volume_drift_rate;
  int audit_passed;
} yb_member_summary;

YB_API const char* yb_version(void);
YB_API const char* yb_last_error(void);
/* Frees strings returned through char** out-parameters. */
YB_API void yb_string_free(char* s);

/* Configuration (JSON schema; unknown keys are rejected). */
YB_API yb_status yb_config_parse(const char* text, yb_config** out);
YB_API yb_status yb_config_load(const char* path, yb_config** out);
YB_API yb_status yb_config_canonical(const yb_config* cfg, char** out);
YB_API void yb_config_free(yb_config* cfg);

/* Grids and fields. lengths holds n side lengths. */
YB_API yb_status yb_grid_create(int n, int m, const double* lengths, yb_grid** out);
YB_API int yb_grid_dim(const yb_grid* grid);
YB_API int yb_grid_points_per_axis(const yb_grid* grid);
YB_API size_t yb_grid_size(const yb_grid* grid);
YB_API void yb_grid_free(yb_grid* grid);

YB_API yb_status yb_field_from_values(const yb_grid* grid, const double* values, size_t count, yb_field** out);
YB_API yb_status yb_field_gen_bandlimited(const yb_grid* grid, uint64_t seed, double amplitude, int kmax,
                                          yb_field** out);
YB_API yb_status yb_field_gen_cosine(const yb_grid* grid, double amplitude, int axis, int mode, yb_field** out);
YB_API size_t yb_field_size(const yb_field* field);
YB_API yb_status yb_field_values(const yb_field* field, double* out, size_t count);
YB_API yb_status yb_field_write_snapshot(const yb_field* field, const char* path);
YB_API yb_status yb_field_read_snapshot(const char* path, yb_field** out);
YB_API void yb_field_free(yb_field* field);

/* Geometry of g = u^{4/(n-2)} h, h = v^{4/(n-2)} * Euclidean (v may be NULL
 * for the flat background). */
YB_API yb_status yb_scalar_curvature(const yb_field* v, const yb_field* u, yb_field** out);
YB_API yb_status yb_volume(const yb_field* v, const yb_field* u, double* out);

/* Single flow run described by a config. A run whose flow fails still
 * returns the partial trajectory in *out together with YB_ERR_NUMERICAL. */
YB_API yb_status yb_run_experiment(const yb_config* cfg, yb_run** out);
YB_API yb_status yb_run_emit(const yb_config* cfg, const yb_run* run, const char* dir);
YB_API size_t yb_run_record_count(const yb_run* run);
YB_API yb_status yb_run_record(const yb_run* run, size_t i, yb_record* out);
YB_API const char* yb_run_termination(const yb_run* run);
YB_API void yb_run_free(yb_run* run);

/* Delta-family sequence experiment; threads = 0 uses all cores. On a member
 * failure *out holds the completed members and YB_ERR_NUMERICAL is returned. */
YB_API yb_status yb_sequence_run(const yb_config* cfg, unsigned threads, yb_sequence** out);
YB_API yb_status yb_sequence_emit(const yb_config* cfg, const yb_sequence* seq, const char* dir);
YB_API size_t yb_sequence_member_count(const yb_sequence* seq);
YB_API yb_status yb_sequence_member(const yb_sequence* seq, size_t i, yb_member_summary* out);
YB_API int yb_sequence_passed(const yb_sequence* seq);
YB_API void yb_sequence_free(yb_sequence* seq);

/* Calibrated initial data for the configured sequence (no flow). */
YB_API yb_status yb_family_create(const yb_config* cfg, yb_family** out);
YB_API size_t yb_family_size(const yb_family* family);
YB_API yb_status yb_family_member(const yb_family* family, size_t i, double* delta, double* amplitude,
                                  double* min_R, yb_field** field);
YB_API void yb_family_free(yb_family* family);

/* Property self-checks; suite is "all", "grid", "flow" or "diagnostics". */
typedef void (*yb_check_callback)(const char* suite, const char* name, int passed, const char* detail,
                                  void* user);
YB_API yb_status yb_check(const char* suite, yb_check_callback callback, void* user, int* all_passed);

#ifdef __cplusplus
}
#endif

#endif
