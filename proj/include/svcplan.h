/*
 * svcplan — SVC placement planning over conic relaxations of network flow.
 *
 * C interface of the shared library. All objects are opaque handles owned
 * by the library; every function that can fail returns a status code and
 * leaves a message retrievable through svcplan_last_error() (thread-local).
 */
#ifndef SVCPLAN_H
#define SVCPLAN_H

#include <stddef.h>

#if defined(_WIN32)
#define SVCPLAN_API __declspec(dllexport)
#else
#define SVCPLAN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum svcplan_status {
  SVCPLAN_OK = 0,
  SVCPLAN_ERR_ARGUMENT = 1,
  SVCPLAN_ERR_IO = 2,
  SVCPLAN_ERR_PARSE = 3,
  SVCPLAN_ERR_INVALID = 4,
  SVCPLAN_ERR_SOLVE = 5,
  SVCPLAN_ERR_INTERNAL = 6
} svcplan_status;

typedef struct svcplan_case svcplan_case;
typedef struct svcplan_scenarios svcplan_scenarios;
typedef struct svcplan_report svcplan_report;

SVCPLAN_API const char* svcplan_version(void);
SVCPLAN_API const char* svcplan_status_name(svcplan_status s);
SVCPLAN_API const char* svcplan_last_error(void);

/* ---- network case ---- */

SVCPLAN_API svcplan_status svcplan_case_load(const char* path,
                                             svcplan_case** out);
SVCPLAN_API svcplan_status svcplan_case_parse(const char* text,
                                              svcplan_case** out);
SVCPLAN_API void svcplan_case_free(svcplan_case* c);

SVCPLAN_API int svcplan_case_bus_count(const svcplan_case* c);
SVCPLAN_API int svcplan_case_branch_count(const svcplan_case* c);
SVCPLAN_API int svcplan_case_generator_count(const svcplan_case* c);
SVCPLAN_API double svcplan_case_base_mva(const svcplan_case* c);
SVCPLAN_API double svcplan_case_load_mw(const svcplan_case* c);
SVCPLAN_API double svcplan_case_load_mvar(const svcplan_case* c);

/* candidate SVC buses (no generator), ascending ids */
SVCPLAN_API svcplan_status svcplan_case_candidates(const svcplan_case* c,
                                                   int* buses, size_t cap,
                                                   size_t* count);

/* ---- scenarios ---- */

SVCPLAN_API svcplan_status svcplan_scenarios_load(const char* path,
                                                  svcplan_scenarios** out);
/* the bundled 15-scenario load-uncertainty table */
SVCPLAN_API svcplan_status svcplan_scenarios_builtin(svcplan_scenarios** out);
/* deterministic base case: one scenario, rho = 1, lambda = 1 */
SVCPLAN_API svcplan_status svcplan_scenarios_single(svcplan_scenarios** out);
SVCPLAN_API void svcplan_scenarios_free(svcplan_scenarios* s);
SVCPLAN_API int svcplan_scenarios_count(const svcplan_scenarios* s);
SVCPLAN_API svcplan_status svcplan_scenarios_row(const svcplan_scenarios* s,
                                                 int row, double* rho,
                                                 double* lambda);

/* ---- planning run ---- */

#define SVCPLAN_MAX_WEIGHT_CASES 8
#define SVCPLAN_MAX_NV 16

typedef struct svcplan_run_options {
  double a1[SVCPLAN_MAX_WEIGHT_CASES];
  double a2[SVCPLAN_MAX_WEIGHT_CASES];
  int weight_case_count;
  int nv[SVCPLAN_MAX_NV];
  int nv_count;
  double svc_b_min;
  double svc_b_max;
  double alpha;     /* cone penalty scale */
  double eps_theta; /* loop angle band, radians */
  int validate_ac;  /* run the nonlinear power-flow check */
  int workers;
  const char* log_dir; /* NULL: no solver/node logs */
} svcplan_run_options;

SVCPLAN_API void svcplan_run_options_init(svcplan_run_options* o);

SVCPLAN_API svcplan_status svcplan_run(const svcplan_case* c,
                                       const svcplan_scenarios* s,
                                       const svcplan_run_options* o,
                                       svcplan_report** out);
SVCPLAN_API void svcplan_report_free(svcplan_report* r);

SVCPLAN_API int svcplan_report_all_ok(const svcplan_report* r);
SVCPLAN_API int svcplan_report_cell_count(const svcplan_report* r);

/* nv is reported as 0 with is_baseline set for the no-install rows */
SVCPLAN_API svcplan_status svcplan_report_cell_info(const svcplan_report* r,
                                                    int cell, int* weight_case,
                                                    int* nv, int* is_baseline,
                                                    int* ok);
SVCPLAN_API svcplan_status svcplan_report_cell_metrics(
    const svcplan_report* r, int cell, double* loss_mw, double* dev_w_pu,
    double* dev_v_pu, double* objective, double* bound_gap,
    double* max_cone_mismatch, double* wall_seconds, int* nodes);
SVCPLAN_API svcplan_status svcplan_report_cell_locations(
    const svcplan_report* r, int cell, int* buses, size_t cap, size_t* count);
SVCPLAN_API svcplan_status svcplan_report_cell_error(const svcplan_report* r,
                                                     int cell, char* buf,
                                                     size_t cap);
/* fails with SVCPLAN_ERR_ARGUMENT when validation was not run for the cell */
SVCPLAN_API svcplan_status svcplan_report_cell_validation(
    const svcplan_report* r, int cell, int* all_converged,
    double* max_loss_rel_err, double* max_v_dev, double* max_loop_residual);

/* writes report.json, table3.csv and the plot-data CSVs under dir */
SVCPLAN_API svcplan_status svcplan_report_write(const svcplan_report* r,
                                                const char* dir);

#ifdef __cplusplus
}
#endif

#endif /* SVCPLAN_H */
