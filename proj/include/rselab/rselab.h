#ifndef RSELAB_RSELAB_H
#define RSELAB_RSELAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(RSELAB_BUILDING_LIBRARY)
#define RSELAB_API __declspec(dllexport)
#else
#define RSELAB_API __declspec(dllimport)
#endif
#else
#define RSELAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rse_status {
  RSE_OK = 0,
  RSE_ERR_INVALID_ARGUMENT = 1,
  RSE_ERR_CONFIG = 2,
  RSE_ERR_NOT_OBSERVABLE = 3,
  RSE_ERR_DIMENSION = 4,
  RSE_ERR_NOT_ATTACKABLE = 5,
  RSE_ERR_AUTH_VIOLATION = 6,
  RSE_ERR_IO = 7,
  RSE_ERR_INTERNAL = 8
} rse_status;

typedef enum rse_omega {
  RSE_OMEGA_PER_STEP = 0,
  RSE_OMEGA_STACKED = 1
} rse_omega;

typedef struct rse_model rse_model;
typedef struct rse_scenario rse_scenario;

/* Message of the last failed call on this thread; never NULL. */
RSELAB_API const char* rse_last_error_message(void);
RSELAB_API const char* rse_version(void);
/* Frees strings returned through char** out-parameters. */
RSELAB_API void rse_free_string(char* s);

/* Matrices are row-major. B may be NULL when m == 0. */
RSELAB_API rse_status rse_model_create(const double* A, const double* B, const double* C, int n, int m, int p,
                                       double delta_w, int N, rse_model** out);
RSELAB_API void rse_model_destroy(rse_model* model);
RSELAB_API rse_status rse_model_dims(const rse_model* model, int* n, int* m, int* p, int* N);
RSELAB_API rse_status rse_prop1_threshold(const rse_model* model, double* d);

/* y has p*N entries, sensor-major (sensor i, step k at i*N + k). x_hat
 * receives n entries; bit i of *support is set when sensor i+1 was declared
 * attacked. */
RSELAB_API rse_status rse_decode(const rse_model* model, const double* y, rse_omega omega, double* x_hat,
                                 uint64_t* support);

/* compromised holds one-based sensor numbers. Each flag receives 0 or 1. */
RSELAB_API rse_status rse_pa_verdict(const rse_model* model, const int* compromised, int count, int* single_step,
                                     int* over_time_id1, int* over_time_id2);

RSELAB_API rse_status rse_scenario_load(const char* path, rse_scenario** out);
RSELAB_API rse_status rse_scenario_from_json(const char* json, rse_scenario** out);
/* "vtf", "example1", "example1_n3". */
RSELAB_API rse_status rse_scenario_builtin(const char* name, rse_scenario** out);
RSELAB_API void rse_scenario_destroy(rse_scenario* scenario);
RSELAB_API rse_status rse_scenario_set_seed(rse_scenario* scenario, uint64_t seed);
RSELAB_API rse_status rse_scenario_set_trace_path(rse_scenario* scenario, const char* path);
RSELAB_API rse_status rse_scenario_to_json(const rse_scenario* scenario, char** out);

/* Commands return a JSON report and the process exit code they map to. */
RSELAB_API rse_status rse_analyze(const rse_scenario* scenario, char** report, int* exit_code);
RSELAB_API rse_status rse_simulate(const rse_scenario* scenario, const char* attack_file, char** report,
                                   int* exit_code);
RSELAB_API rse_status rse_synthesize_attack(const rse_scenario* scenario, const char* out_csv, char** report);
RSELAB_API rse_status rse_decode_window(const rse_scenario* scenario, const char* window_csv, char** report);
RSELAB_API rse_status rse_reproduce(const char* figure, const char* out_dir, uint64_t seed, char** report);

#ifdef __cplusplus
}
#endif

#endif
