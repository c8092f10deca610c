#ifndef VCH_VCH_H
#define VCH_VCH_H

/* C interface to the kinetic / Cahn-Hilliard simulator. Every function that
 * can fail returns a vch_status; the message of the last failure on the
 * calling thread is available from vch_last_error(). */

#include <stddef.h>

#if defined(_WIN32)
#if defined(VCH_BUILDING)
#define VCH_API __declspec(dllexport)
#else
#define VCH_API __declspec(dllimport)
#endif
#else
#define VCH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vch_status {
  VCH_OK = 0,
  VCH_ERR_VALIDATION = 1, /* bad configuration, parameters or input data */
  VCH_ERR_RUNTIME = 2,    /* solver failure, e.g. step-size violation */
  VCH_ERR_IO = 3,         /* unreadable or corrupt files */
  VCH_ERR_ARGUMENT = 4    /* null pointers and similar misuse */
} vch_status;

typedef struct vch_config vch_config;
typedef struct vch_report vch_report;

typedef struct vch_snapshot_info {
  unsigned version;
  unsigned dim;
  unsigned n;
  unsigned m; /* 0 for spatial fields */
  double period;
  double xi_max;
} vch_snapshot_info;

VCH_API const char* vch_version(void);
VCH_API const char* vch_last_error(void);
VCH_API const char* vch_status_name(vch_status status);

VCH_API vch_status vch_config_default(vch_config** out);
VCH_API vch_status vch_config_load(const char* path, vch_config** out);
/* Sets `key` of `[section]` exactly as a config file line would. */
VCH_API vch_status vch_config_set(vch_config* config, const char* section, const char* key, const char* value);
VCH_API vch_status vch_config_validate(const vch_config* config);
VCH_API void vch_config_free(vch_config* config);

/* Runs write under <out_dir>/<run_id> when out_dir is non-null. */
/* eps <= 0 selects the first entry of the configured eps list. */
VCH_API vch_status vch_run_kinetic(const vch_config* config, double eps, const char* out_dir, vch_report** out);
VCH_API vch_status vch_run_macro(const vch_config* config, const char* out_dir, vch_report** out);
VCH_API vch_status vch_run_sweep(const vch_config* config, const char* out_dir, vch_report** out);
/* Re-evaluates diagnostics on a phase-space snapshot. config may be null, in
 * which case defaults with the snapshot's grid are used. */
VCH_API vch_status vch_check_snapshot(const vch_config* config, const char* path, double eps, vch_report** out);

VCH_API const char* vch_report_text(const vch_report* report);
/* 1 when every check of the run held, 0 otherwise. */
VCH_API int vch_report_passed(const vch_report* report);
/* Looks up a named scalar of the report. Returns VCH_ERR_ARGUMENT if absent. */
VCH_API vch_status vch_report_metric(const vch_report* report, const char* name, double* value);
VCH_API const char* vch_report_output_dir(const vch_report* report);
VCH_API void vch_report_free(vch_report* report);

/* Summary of a run directory written by one of the run functions. The
 * string must be released with vch_string_free. */
VCH_API vch_status vch_render_report(const char* dir, char** text);
VCH_API vch_status vch_snapshot_header(const char* path, vch_snapshot_info* info);
VCH_API void vch_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
