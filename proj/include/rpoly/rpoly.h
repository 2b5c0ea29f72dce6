/* C interface to the random polytope library. All objects are opaque
 * handles; every fallible call returns an rpoly_status and leaves a message
 * for rpoly_last_error() on the calling thread. */
#ifndef RPOLY_RPOLY_H
#define RPOLY_RPOLY_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RPOLY_API __declspec(dllexport)
#else
#define RPOLY_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rpoly_status {
    RPOLY_OK = 0,
    RPOLY_ERR_INVALID_ARGUMENT = 1,
    RPOLY_ERR_CONFIG = 2,
    RPOLY_ERR_DATA = 3,
    RPOLY_ERR_DEGENERATE = 4,
    RPOLY_ERR_IO = 5,
    RPOLY_ERR_INTERNAL = 6
} rpoly_status;

typedef struct rpoly_config rpoly_config;
typedef struct rpoly_report rpoly_report;
typedef struct rpoly_body rpoly_body;
typedef struct rpoly_hull rpoly_hull;

RPOLY_API const char* rpoly_version(void);
/* Message of the last failed call on this thread; empty after a success. */
RPOLY_API const char* rpoly_last_error(void);

RPOLY_API size_t rpoly_experiment_count(void);
RPOLY_API const char* rpoly_experiment_name(size_t index);
RPOLY_API const char* rpoly_experiment_description(size_t index);

RPOLY_API rpoly_status rpoly_config_parse(const char* json_text, rpoly_config** out);
RPOLY_API rpoly_status rpoly_config_load(const char* path, rpoly_config** out);
RPOLY_API int rpoly_config_workers(const rpoly_config* config);
/* Output directory named in the config, or "" when absent. */
RPOLY_API const char* rpoly_config_output(const rpoly_config* config);
RPOLY_API void rpoly_config_free(rpoly_config* config);

/* workers <= 0 falls back to the config value, then to the hardware count. */
RPOLY_API rpoly_status rpoly_run(const rpoly_config* config, int workers, rpoly_report** out);
RPOLY_API int64_t rpoly_report_failed_trials(const rpoly_report* report);
/* The report.json text; owned by the report. */
RPOLY_API rpoly_status rpoly_report_json(const rpoly_report* report, const char** text, size_t* length);
RPOLY_API rpoly_status rpoly_report_write(const rpoly_report* report, const char* directory, int raw);
RPOLY_API void rpoly_report_free(rpoly_report* report);

/* kind is "ball", "cube", "simplex" or "ellipsoid"; params are the
 * ellipsoid's relative semi-axes and are ignored otherwise. */
RPOLY_API rpoly_status rpoly_body_create(const char* kind, int dim, const double* params, size_t param_count, rpoly_body** out);
RPOLY_API int rpoly_body_dim(const rpoly_body* body);
RPOLY_API rpoly_status rpoly_body_contains(const rpoly_body* body, const double* x, int* inside);
RPOLY_API rpoly_status rpoly_body_minimal_cap_volume(const rpoly_body* body, const double* x, double* volume);
/* count uniform points into out (count * dim doubles), stream (seed, stream_id). */
RPOLY_API rpoly_status rpoly_body_sample(const rpoly_body* body, uint64_t seed, uint64_t stream_id, size_t count, double* out);
RPOLY_API void rpoly_body_free(rpoly_body* body);

/* coords holds count points of dim coordinates each, row by row. */
RPOLY_API rpoly_status rpoly_hull_build(int dim, const double* coords, size_t count, rpoly_hull** out);
RPOLY_API double rpoly_hull_volume(const rpoly_hull* hull);
RPOLY_API rpoly_status rpoly_hull_face_count(const rpoly_hull* hull, int face_dim, int64_t* count);
RPOLY_API rpoly_status rpoly_hull_insert(rpoly_hull* hull, const double* x, int* inserted);
RPOLY_API rpoly_status rpoly_hull_contains(const rpoly_hull* hull, const double* x, int* inside);
RPOLY_API void rpoly_hull_free(rpoly_hull* hull);

#ifdef __cplusplus
}
#endif

#endif
