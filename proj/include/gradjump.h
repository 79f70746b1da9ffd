/* gradjump: composed gradient flows with jump controls.
 *
 * C interface to the simulation, inversion and identity-verification
 * engine. All functions are thread-safe as long as each gj_scenario is
 * used from one thread at a time. Error details for the calling thread
 * are available via gj_last_error().
 */
#ifndef GRADJUMP_H
#define GRADJUMP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GJ_API __declspec(dllexport)
#else
#define GJ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gj_status {
  GJ_OK = 0,
  GJ_GATE_FAILURE = 1,    /* admissibility or contraction gate refused */
  GJ_PARSE_ERROR = 2,     /* bad config file or invalid argument values */
  GJ_NUMERIC_ERROR = 3,   /* integrator failure, domain escape, divergence */
  GJ_INVALID_ARGUMENT = 4 /* null handle, bad buffer size */
} gj_status;

typedef struct gj_scenario gj_scenario;

GJ_API const char* gj_version(void);

/* Last error message for the calling thread; empty string if none. */
GJ_API const char* gj_last_error(void);

/* Load a scenario config from a JSON file / from a JSON string. On success
 * *out owns the scenario and must be released with gj_scenario_close. */
GJ_API gj_status gj_scenario_open(const char* path, gj_scenario** out);
GJ_API gj_status gj_scenario_parse(const char* json_text, gj_scenario** out);
GJ_API void gj_scenario_close(gj_scenario* sc);

GJ_API gj_status gj_scenario_set_seed(gj_scenario* sc, uint64_t seed);
GJ_API gj_status gj_scenario_set_threads(gj_scenario* sc, int threads);
/* Multiplies every verdict threshold (not integrator tolerances). */
GJ_API gj_status gj_scenario_set_tol_scale(gj_scenario* sc, double scale);

GJ_API int gj_scenario_dimension(const gj_scenario* sc);
GJ_API int gj_scenario_field_count(const gj_scenario* sc);

/* Batch commands. Each writes CSV outputs plus report.json into out_dir
 * and returns the same code the CLI exits with. */
GJ_API gj_status gj_run(const gj_scenario* sc, const char* out_dir);
GJ_API gj_status gj_invert(const gj_scenario* sc, const char* out_dir);
GJ_API gj_status gj_verify(const gj_scenario* sc, const char* out_dir);

/* Single-point evaluation of the forward flow x(t) for the scenario's
 * control started at lambda. lambda and x_out hold dimension() doubles. */
GJ_API gj_status gj_evolve_point(const gj_scenario* sc, double t, const double* lambda,
                                 double* x_out);

/* Single-point inverse: the lambda that the forward flow carries to x at
 * time t (left limit of the parameterization at jump times). */
GJ_API gj_status gj_invert_point(const gj_scenario* sc, double t, const double* x,
                                 double* lambda_out);

#ifdef __cplusplus
}
#endif

#endif /* GRADJUMP_H */
