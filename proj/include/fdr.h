#ifndef FDR_H
#define FDR_H

/* C interface to the format-decoupled reward engine.
 *
 * Every fallible call returns an fdr_status; on failure fdr_last_error()
 * holds a message for the calling thread until its next fdr_* call.
 * Strings are UTF-8 and NUL-terminated. Optional paths may be NULL. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(FDR_BUILDING_LIBRARY)
#    define FDR_API __declspec(dllexport)
#  else
#    define FDR_API __declspec(dllimport)
#  endif
#else
#  define FDR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fdr_status {
  FDR_OK = 0,
  FDR_E_IO = 1,
  FDR_E_SCHEMA = 2,
  FDR_E_CONFIG = 3,
  FDR_E_INVALID_ARGUMENT = 4,
  FDR_E_EMPTY_GROUND_TRUTH = 5,
  FDR_E_NOT_FOUND = 6,
  FDR_E_MALFORMED_TABLE = 7,
  FDR_E_INTERNAL = 99
} fdr_status;

/* Opaque engine: a profile registry, the active profile and a worker count.
 * Const calls on one engine may run concurrently. */
typedef struct fdr_engine fdr_engine;

FDR_API const char* fdr_version(void);
FDR_API const char* fdr_last_error(void);
FDR_API const char* fdr_status_name(fdr_status status);

/* config_path NULL: built-in profiles only. The active profile is "default". */
FDR_API fdr_status fdr_engine_create(const char* config_path, fdr_engine** out);
FDR_API fdr_status fdr_engine_create_from_string(const char* config_text, fdr_engine** out);
FDR_API void fdr_engine_destroy(fdr_engine* engine);

FDR_API fdr_status fdr_engine_use_profile(fdr_engine* engine, const char* name);
/* Overrides one key of the active profile, e.g. ("table_reward", "false").
 * The key "workers" sets the worker count (0 = hardware concurrency). */
FDR_API fdr_status fdr_engine_set(fdr_engine* engine, const char* key, const char* value);
/* JSON array of profile names; free with fdr_string_free. */
FDR_API fdr_status fdr_engine_profiles(const fdr_engine* engine, char** out_json);

typedef struct fdr_reward_breakdown {
  int has_text;
  int has_formula;
  int has_table;
  double text;
  double formula;
  double table;
  int present_types;
  double composite;
} fdr_reward_breakdown;

FDR_API fdr_status fdr_reward(const fdr_engine* engine, const char* prediction, const char* ground_truth,
                              fdr_reward_breakdown* out);

FDR_API fdr_status fdr_mean_entropy(const double* logprobs, size_t n, double* out);
/* out holds n values. */
FDR_API fdr_status fdr_group_advantages(const fdr_engine* engine, const double* rewards, size_t n, double* out);
FDR_API fdr_status fdr_grpo_objective(const fdr_engine* engine, const double* ratios, const double* advantages,
                                      size_t n, double* out);
FDR_API fdr_status fdr_overall_score(double text_edit, double formula, double table_teds, double* out);
FDR_API fdr_status fdr_levenshtein(const char* a, const char* b, size_t* out);
/* Markup is an HTML table or a Markdown pipe table. */
FDR_API fdr_status fdr_teds(const char* pred_markup, const char* gt_markup, int structure_only, double* out);

typedef enum fdr_entropy_mode { FDR_ENTROPY_TOP_FRACTION = 0, FDR_ENTROPY_THRESHOLD = 1 } fdr_entropy_mode;

typedef struct fdr_filter_options {
  fdr_entropy_mode mode;
  double threshold;
  double keep_fraction;
  int require_formatted;
  int balance_languages;
  uint64_t seed;
  const char* drop_doc_types; /* comma separated, NULL or "" for none */
  const char* stages;         /* comma separated order, NULL for "type,entropy,balance" */
} fdr_filter_options;

FDR_API void fdr_filter_options_init(fdr_filter_options* opts);

FDR_API fdr_status fdr_run_segment(const char* input, const char* output);
FDR_API fdr_status fdr_run_reward(const fdr_engine* engine, const char* input, const char* output,
                                  const char* summary);
FDR_API fdr_status fdr_run_filter(const fdr_filter_options* opts, const char* input, const char* output,
                                  const char* report);
FDR_API fdr_status fdr_run_bench(const fdr_engine* engine, const char* input, const char* output,
                                 const char* formula_scores, const char* table, const char* per_sample);
FDR_API fdr_status fdr_run_bench_rows(const char* input, const char* output, const char* table);
FDR_API fdr_status fdr_run_advantages(const fdr_engine* engine, const char* input, const char* output);

/* One service request (same JSON as the HTTP bodies). The response is
 * written even for request errors; the status reports only transport-level
 * failures. Free with fdr_string_free. */
FDR_API fdr_status fdr_handle_request(const fdr_engine* engine, const char* request_json, char** out_json);
FDR_API void fdr_string_free(char* s);

/* Blocking servers. */
FDR_API fdr_status fdr_serve_pipe(const fdr_engine* engine);
FDR_API fdr_status fdr_serve_http(const fdr_engine* engine, const char* bind);

#ifdef __cplusplus
}
#endif

#endif
