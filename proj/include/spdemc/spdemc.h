#ifndef SPDEMC_H
#define SPDEMC_H

#include <stddef.h>

#if defined(_WIN32)
#define SPDEMC_API __declspec(dllexport)
#else
#define SPDEMC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum spdemc_status {
    SPDEMC_OK = 0,
    SPDEMC_ERR_INVALID_ARGUMENT = 1,
    SPDEMC_ERR_DOMAIN = 2,
    SPDEMC_ERR_CONFIGURATION = 3,
    SPDEMC_ERR_NUMERIC = 4,
    SPDEMC_ERR_STABILITY = 5,
    SPDEMC_ERR_CONVERGENCE = 6,
    SPDEMC_ERR_DEGENERATE = 7,
    SPDEMC_ERR_IO = 8,
    SPDEMC_ERR_INTERNAL = 9
} spdemc_status;

typedef struct spdemc_config spdemc_config;
typedef struct spdemc_report spdemc_report;
typedef struct spdemc_solver spdemc_solver;

typedef struct spdemc_model {
    double mu;
    double rho;
    double sigma;
    double r;
} spdemc_model;

SPDEMC_API const char* spdemc_version(void);
SPDEMC_API const char* spdemc_status_string(spdemc_status status);
/* Message of the last failure on the calling thread; empty after success. */
SPDEMC_API const char* spdemc_last_error(void);

SPDEMC_API size_t spdemc_experiment_count(void);
SPDEMC_API const char* spdemc_experiment_name(size_t index);

/* Experiment configuration: flat key=value settings. */
SPDEMC_API spdemc_status spdemc_config_create(const char* experiment, spdemc_config** out);
SPDEMC_API void spdemc_config_destroy(spdemc_config* config);
SPDEMC_API spdemc_status spdemc_config_set(spdemc_config* config, const char* key, const char* value);
SPDEMC_API spdemc_status spdemc_config_parse(spdemc_config* config, const char* text);
SPDEMC_API spdemc_status spdemc_config_load(spdemc_config* config, const char* path);

SPDEMC_API spdemc_status spdemc_run(const spdemc_config* config, spdemc_report** out);
SPDEMC_API void spdemc_report_destroy(spdemc_report* report);
/* key=value lines; the pointer lives as long as the report. */
SPDEMC_API const char* spdemc_report_summary(const spdemc_report* report);
SPDEMC_API int spdemc_report_passed(const spdemc_report* report);
SPDEMC_API size_t spdemc_report_table_count(const spdemc_report* report);
SPDEMC_API const char* spdemc_report_table_name(const spdemc_report* report, size_t index);
SPDEMC_API const char* spdemc_report_table_csv(const spdemc_report* report, size_t index);
SPDEMC_API spdemc_status spdemc_report_write(const spdemc_report* report, const char* directory);

SPDEMC_API spdemc_status spdemc_model_from_credit(double sigma, double rho, double r, spdemc_model* out);
SPDEMC_API spdemc_status spdemc_ms_amplification(const spdemc_model* model, double theta, double h,
                                                 double k, double* out);
SPDEMC_API spdemc_status spdemc_exact_density(const spdemc_model* model, double x, double t,
                                              double market_endpoint, double x0, double* out);

/* Single-path solver on [x_min, x_min + intervals*h] started from a point mass. */
SPDEMC_API spdemc_status spdemc_solver_create(const spdemc_model* model, double x_min, double h,
                                              int intervals, double k, double x0, int pentadiagonal,
                                              spdemc_solver** out);
SPDEMC_API void spdemc_solver_destroy(spdemc_solver* solver);
SPDEMC_API spdemc_status spdemc_solver_step(spdemc_solver* solver, const double* z, size_t count);
/* Applies the default-monitoring condition at x = 0. */
SPDEMC_API spdemc_status spdemc_solver_monitor(spdemc_solver* solver);
SPDEMC_API size_t spdemc_solver_size(const spdemc_solver* solver);
/* Copies the interior values v_1..v_{J-1}; capacity must be >= spdemc_solver_size. */
SPDEMC_API spdemc_status spdemc_solver_values(const spdemc_solver* solver, double* out, size_t capacity);
SPDEMC_API spdemc_status spdemc_solver_mass(const spdemc_solver* solver, double* out);

#ifdef __cplusplus
}
#endif

#endif
