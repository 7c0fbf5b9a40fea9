/* Copyright 2026 The jotdp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to jotdp.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every fallible call returns a jotdp_status; on failure the message is
 * available from jotdp_last_error() on the same thread until the next call.
 * Strings returned through char** out-parameters are heap allocated and must
 * be released with jotdp_string_free(). */

#ifndef JOTDP_JOTDP_H_
#define JOTDP_JOTDP_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define JOTDP_API __declspec(dllexport)
#else
#define JOTDP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum jotdp_status {
  JOTDP_OK = 0,
  JOTDP_INVALID_ARGUMENT = 1,
  JOTDP_OUT_OF_RANGE = 2,
  JOTDP_NOT_FOUND = 3,
  JOTDP_RESOURCE_EXHAUSTED = 4,
  JOTDP_FAILED_PRECONDITION = 5,
  JOTDP_INTERNAL = 6
} jotdp_status;

typedef struct jotdp_dataset jotdp_dataset;
typedef struct jotdp_pmf jotdp_pmf;
typedef struct jotdp_mechanism jotdp_mechanism;

typedef struct jotdp_result {
  int64_t output;
  uint64_t runtime; /* meter units: RAM steps or coin tosses */
  uint32_t iterations;
  uint64_t bound;
  int truncated;
  uint64_t seed;
} jotdp_result;

typedef struct jotdp_report {
  double eps_hat; /* +inf on an exact support mismatch */
  int exact;      /* 1 for an exact ratio, 0 for a Monte Carlo lower bound */
  double confidence;
  int64_t worst_output;
  uint64_t worst_runtime;
  int support_mismatch;
  int has_witness;
  int64_t witness_output;
  uint64_t witness_runtime;
  uint64_t outcomes_compared;
} jotdp_report;

typedef struct jotdp_schedule_row {
  uint32_t i;
  double eps;
  double beta;
  uint64_t m;
  double eps_sum;
} jotdp_schedule_row;

JOTDP_API const char* jotdp_version(void);
JOTDP_API const char* jotdp_last_error(void);
JOTDP_API void jotdp_string_free(char* s);

/* Datasets of integer records in [0, delta]. */
JOTDP_API jotdp_status jotdp_dataset_create(const int64_t* records, size_t n,
                                            int64_t delta,
                                            jotdp_dataset** out);
/* "empty", "ones:N", "zeros:N", "file:PATH" or an inline list "1,0,1". */
JOTDP_API jotdp_status jotdp_dataset_parse(const char* text, int64_t delta,
                                           jotdp_dataset** out);
/* A copy of `x` with one more record. */
JOTDP_API jotdp_status jotdp_dataset_insert(const jotdp_dataset* x,
                                            int64_t record,
                                            jotdp_dataset** out);
JOTDP_API size_t jotdp_dataset_size(const jotdp_dataset* x);
JOTDP_API int64_t jotdp_dataset_delta(const jotdp_dataset* x);
JOTDP_API void jotdp_dataset_free(jotdp_dataset* x);

/* Probability tables. dl lists the window [lo, hi] of the uncensored
 * distribution; adaptive lists outcomes 0..max_outcome; dsg takes
 * p = p_num / 2^p_kbits. */
JOTDP_API jotdp_status jotdp_pmf_dl(int64_t mu, double s, int64_t lo,
                                    int64_t hi, jotdp_pmf** out);
JOTDP_API jotdp_status jotdp_pmf_cdl(int64_t mu, double s, int64_t lo,
                                     int64_t hi, jotdp_pmf** out);
JOTDP_API jotdp_status jotdp_pmf_adaptive(uint64_t n, uint32_t c, uint64_t k,
                                          uint64_t max_outcome,
                                          jotdp_pmf** out);
JOTDP_API jotdp_status jotdp_pmf_dsg(int64_t mu, uint64_t p_num,
                                     uint32_t p_kbits, int64_t lo, int64_t hi,
                                     jotdp_pmf** out);
JOTDP_API size_t jotdp_pmf_size(const jotdp_pmf* pmf);
JOTDP_API int64_t jotdp_pmf_outcome(const jotdp_pmf* pmf, size_t i);
JOTDP_API double jotdp_pmf_mass(const jotdp_pmf* pmf, size_t i);
JOTDP_API double jotdp_pmf_residual(const jotdp_pmf* pmf);
JOTDP_API int jotdp_pmf_is_exact(const jotdp_pmf* pmf);
/* "num/den" for exact tables, a decimal otherwise. */
JOTDP_API jotdp_status jotdp_pmf_mass_string(const jotdp_pmf* pmf, size_t i,
                                             char** out);
JOTDP_API jotdp_status jotdp_pmf_to_json(const jotdp_pmf* pmf, char** out);
JOTDP_API jotdp_status jotdp_pmf_to_csv(const jotdp_pmf* pmf, char** out);
JOTDP_API void jotdp_pmf_free(jotdp_pmf* pmf);

/* Program 1 iteration schedule; rows are numbered from 1. */
JOTDP_API jotdp_status jotdp_schedule_row_at(double eps_prime, double beta,
                                             uint32_t i,
                                             jotdp_schedule_row* out);
JOTDP_API jotdp_status jotdp_schedule_to_json(double eps_prime, double beta,
                                              uint32_t rows, char** out);
JOTDP_API jotdp_status jotdp_schedule_to_csv(double eps_prime, double beta,
                                             uint32_t rows, char** out);

/* Mechanisms are configured from a JSON object, e.g.
 * {"mech": "program2", "c": 2, "k": 3}. */
JOTDP_API jotdp_status jotdp_mechanism_create(const char* config_json,
                                              jotdp_mechanism** out);
/* The full configuration with defaults filled in. */
JOTDP_API jotdp_status jotdp_mechanism_config_json(const jotdp_mechanism* m,
                                                   char** out);
JOTDP_API jotdp_status jotdp_mechanism_declared_epsilon(
    const jotdp_mechanism* m, int64_t delta, double* out);
JOTDP_API void jotdp_mechanism_free(jotdp_mechanism* m);

JOTDP_API jotdp_status jotdp_run(const jotdp_mechanism* m,
                                 const jotdp_dataset* x, uint64_t seed,
                                 jotdp_result* out);
JOTDP_API jotdp_status jotdp_result_to_json(const jotdp_result* r,
                                            char** out);

/* Audits of an adjacent pair. A privacy violation is reported through the
 * report fields, not the status. */
JOTDP_API jotdp_status jotdp_audit_exact(const jotdp_mechanism* m,
                                         const jotdp_dataset* a,
                                         const jotdp_dataset* b,
                                         jotdp_report* out);
JOTDP_API jotdp_status jotdp_audit_exact_output_only(const jotdp_mechanism* m,
                                                     const jotdp_dataset* a,
                                                     const jotdp_dataset* b,
                                                     jotdp_report* out);
JOTDP_API jotdp_status jotdp_audit_mc(const jotdp_mechanism* m,
                                      const jotdp_dataset* a,
                                      const jotdp_dataset* b, uint64_t trials,
                                      uint64_t seed, double confidence,
                                      unsigned workers, jotdp_report* out);
JOTDP_API jotdp_status jotdp_report_to_json(const jotdp_report* r,
                                            char** out);

/* CSV (output,runtime,mass) of the exact joint distribution on `x`. */
JOTDP_API jotdp_status jotdp_exact_joint_csv(const jotdp_mechanism* m,
                                             const jotdp_dataset* x,
                                             char** out);

/* Fast-halt output sets of the adaptive count under a runtime budget. */
JOTDP_API jotdp_status jotdp_demo_lower_bound(uint32_t c, uint64_t k,
                                              uint64_t budget,
                                              const uint64_t* ns, size_t count,
                                              uint64_t trials, uint64_t seed,
                                              unsigned workers,
                                              char** json_out,
                                              char** csv_out);

/* Runtime of the adaptive count is fixed + per_flip * (output + 1). */
JOTDP_API jotdp_status jotdp_adaptive_count_cost(uint32_t c, uint64_t* fixed,
                                                 uint64_t* per_flip);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* JOTDP_JOTDP_H_ */
