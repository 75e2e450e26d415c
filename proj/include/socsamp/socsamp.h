#ifndef SOCSAMP_SOCSAMP_H
#define SOCSAMP_SOCSAMP_H

/* C interface to the social sampling simulator. Every call returns a status;
 * on failure socsamp_last_error() describes the problem for the calling
 * thread. Strings returned through char** are owned by the caller and must be
 * released with socsamp_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SOCSAMP_API __declspec(dllexport)
#else
#define SOCSAMP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct socsamp_config socsamp_config;
typedef struct socsamp_summary socsamp_summary;

typedef enum socsamp_status {
  SOCSAMP_OK = 0,
  SOCSAMP_ERR_ARGUMENT = 1,   /* null handle or pointer */
  SOCSAMP_ERR_CONFIG = 2,     /* schema violation */
  SOCSAMP_ERR_ASSUMPTION = 3, /* A1, A2 or A4 fails */
  SOCSAMP_ERR_HYPOTHESIS = 4, /* lambda2 >= 1 - delta/2 */
  SOCSAMP_ERR_STABILITY = 5,
  SOCSAMP_ERR_DOMAIN = 6,
  SOCSAMP_ERR_TRIAL_ABORT = 7,
  SOCSAMP_ERR_INTERNAL = 8
} socsamp_status;

SOCSAMP_API const char* socsamp_last_error(void);
SOCSAMP_API const char* socsamp_status_name(socsamp_status status);
SOCSAMP_API void socsamp_string_free(char* text);

/* Schema-level parse only; call socsamp_config_validate before simulating. */
SOCSAMP_API socsamp_status socsamp_config_parse_file(const char* path, socsamp_config** out);
SOCSAMP_API socsamp_status socsamp_config_parse_text(const char* text, const char* base_dir, socsamp_config** out);
/* Override one dotted key, e.g. ("experiment.seed", "7"). */
SOCSAMP_API socsamp_status socsamp_config_set(socsamp_config* config, const char* key, const char* value);
/* Applies `count` overrides together, e.g. a network kind plus its keys. */
SOCSAMP_API socsamp_status socsamp_config_set_many(socsamp_config* config, const char* const* keys,
                                                   const char* const* values, size_t count);
SOCSAMP_API socsamp_status socsamp_config_validate(const socsamp_config* config);
SOCSAMP_API socsamp_status socsamp_config_serialize(const socsamp_config* config, char** out);
SOCSAMP_API uint64_t socsamp_config_digest(const socsamp_config* config);
SOCSAMP_API void socsamp_config_free(socsamp_config* config);

/* Runs all replications and writes outputs under experiment.out (if set). */
SOCSAMP_API socsamp_status socsamp_simulate(const socsamp_config* config, socsamp_summary** out);
SOCSAMP_API socsamp_status socsamp_summary_text(const socsamp_summary* summary, char** out);
/* 1 when every enabled predicate passed, 0 otherwise (or for a null handle). */
SOCSAMP_API int socsamp_summary_passed(const socsamp_summary* summary);
SOCSAMP_API double socsamp_summary_wall_seconds(const socsamp_summary* summary);
SOCSAMP_API void socsamp_summary_free(socsamp_summary* summary);

/* Theory-only report text. */
SOCSAMP_API socsamp_status socsamp_analyze(const socsamp_config* config, char** report);
/* Assumption audit; *all_passed is 1 when every check passed. */
SOCSAMP_API socsamp_status socsamp_check(const socsamp_config* config, char** text, int* all_passed);
/* Trace CSV of one trial. stride may be NULL for every step. */
SOCSAMP_API socsamp_status socsamp_replay(const socsamp_config* config, uint64_t trial, const char* stride,
                                          char** csv);

#ifdef __cplusplus
}
#endif

#endif
