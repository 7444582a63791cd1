#ifndef PINDOT_H
#define PINDOT_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  PD_OK = 0,
  PD_INVALID_ARGUMENT = 1, /* malformed input or violated precondition */
  PD_CONFIG_ERROR = 2,     /* experiment or tool configuration rejected */
  PD_IO_ERROR = 3,
  PD_INTERNAL_ERROR = 4
} pd_status;

typedef struct pd_cloud pd_cloud;
typedef struct pd_scalar_set pd_scalar_set;

/* Message of the last failing call on this thread, "" if none. */
const char* pd_last_error(void);
const char* pd_version(void);
/* 0 selects hardware concurrency. Results do not depend on the count. */
pd_status pd_set_threads(int n);
/* Frees strings returned through char** out-parameters. */
void pd_string_free(char* s);

pd_status pd_cloud_from_json(const char* json, pd_cloud** out);
pd_status pd_cloud_to_json(const pd_cloud* c, char** out);
/* generator: {"type": "cantor", "ratio": "1/3", "depth": 6, "power": 2, ...} */
pd_status pd_cloud_generate(const char* generator_json, pd_cloud** out);
void pd_cloud_free(pd_cloud* c);
size_t pd_cloud_size(const pd_cloud* c);
int pd_cloud_dim(const pd_cloud* c);
int pd_cloud_level(const pd_cloud* c);

/* theta: unit vector of length pd_cloud_dim(c). */
pd_status pd_orthogonal_project(const pd_cloud* c, const double* theta, pd_scalar_set** out);
/* a, x: pd_cloud_dim(c) rational strings each, e.g. "3/4". level < 0 picks the matched level. */
pd_status pd_dot_product_set(const pd_cloud* c, const char* const* a, const char* const* x, int level,
                             pd_scalar_set** out);
pd_status pd_scalar_set_to_json(const pd_scalar_set* s, char** out);
void pd_scalar_set_free(pd_scalar_set* s);
size_t pd_scalar_set_size(const pd_scalar_set* s);

/* options: NULL or {"base": 2, "window": [lo, hi]}. Writes a report document. */
pd_status pd_estimate_dimension_cloud(const pd_cloud* c, const char* options_json, char** report_json);
pd_status pd_estimate_dimension_scalar(const pd_scalar_set* s, const char* options_json, char** report_json);

pd_status pd_keylemma_check(const pd_cloud* c, const char* const* a, const char* const* x, char** report_json);

/* Runs an experiment config. out_dir overrides the config's "output" when non-NULL.
   PD_OK means the run completed; the record's "pass" field carries the verdict. */
pd_status pd_run(const char* config_json, const char* out_dir, char** record_json);
/* op: "gen", "project", "dotset" or "dim". */
pd_status pd_tool(const char* op, const char* config_json, const char* out_dir, char** result_json);
/* records_json: array of run records. */
pd_status pd_report(const char* records_json, char** summary_json, char** table);

#ifdef __cplusplus
}
#endif

#endif
