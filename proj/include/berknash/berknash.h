/* C interface to the network-game equilibrium and simulation library.
 *
 * Conventions: functions that can fail return bn_status and, on failure,
 * store a malloc'd message in *err when err is non-NULL. Every string the
 * library hands out (outputs and error messages) is released with
 * bn_string_free. Status codes double as process exit codes. */

#ifndef BERKNASH_H
#define BERKNASH_H

#include <stdint.h>

#if defined(_WIN32)
#define BN_API __declspec(dllexport)
#else
#define BN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bn_status {
  BN_OK = 0,
  BN_ERR_CONFIG = 2, /* malformed config, invalid parameters, bad budget */
  BN_ERR_SOLVER = 3, /* singular systems, divergence, numerical failure */
  BN_ERR_IO = 4      /* unreadable or unwritable files */
} bn_status;

/* Opaque parsed scenario configuration. */
typedef struct bn_config bn_config;

BN_API const char* bn_version(void);

BN_API bn_status bn_config_parse(const char* json_text, bn_config** out,
                                 char** err);
BN_API bn_status bn_config_load(const char* path, bn_config** out, char** err);
BN_API void bn_config_free(bn_config* config);

/* Canonical JSON for the parsed config, and its 16-hex-digit hash. */
BN_API bn_status bn_config_json(const bn_config* config, char** out, char** err);
BN_API bn_status bn_config_hash(const bn_config* config, char** out, char** err);

/* Random scenario: dense weights rescaled to spectral radius 0.8 * min r,
 * greedy attention sets of size avg_degree, per-agent noise scale sigma.
 * Returns a complete config document as JSON. */
BN_API bn_status bn_generate(int n, int avg_degree, double weight_coverage,
                             uint64_t seed, double sigma, char** out,
                             char** err);

/* Stability report (spectral radii, stable flag) as JSON. */
BN_API bn_status bn_validate(const bn_config* config, char** out, char** err);

/* kind is one of "ne", "bne-const", "bne-gmf", "bne-lmf"; the result JSON
 * carries the action profile, fitted conjecture values, and residual. */
BN_API bn_status bn_solve(const bn_config* config, const char* kind, char** out,
                          char** err);

/* Cost comparison of the conjectured equilibrium against Nash, as JSON. */
BN_API bn_status bn_vom(const bn_config* config, char** out, char** err);

/* Deviation-bound table as CSV, one row per scale in the comma-separated
 * list (NULL or empty means 0,0.25,0.5,1). */
BN_API bn_status bn_vom_table(const bn_config* config, const char* scales,
                              char** out, char** err);

/* Optimal distortion plan, KKT residuals, and induced equilibrium as JSON. */
BN_API bn_status bn_arbitrage(const bn_config* config, char** out, char** err);

/* One learning run at the given seed: trace CSV plus summary JSON. */
BN_API bn_status bn_simulate_learning(const bn_config* config, uint64_t seed,
                                      char** trace_csv, char** summary_json,
                                      char** err);

/* One coupled fast/slow run: trace CSV, diagnostics CSV (k and the three
 * per-step movement norms), and summary JSON. */
BN_API bn_status bn_simulate_two_timescale(const bn_config* config,
                                           uint64_t seed, char** trace_csv,
                                           char** diagnostics_csv,
                                           char** summary_json, char** err);

BN_API void bn_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* BERKNASH_H */
