#ifndef REPDIGIT_PROVER_H
#define REPDIGIT_PROVER_H

/* Generated with cbindgen:0.26 conventions (see cbindgen.toml). */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes; the nonzero values match the CLI exit codes.
 */
typedef enum RpStatus {
  RP_STATUS_OK = 0,
  RP_STATUS_ERROR = 1,
  RP_STATUS_PROOF_INCOMPLETE = 2,
  RP_STATUS_PRECISION_EXHAUSTED = 3,
  RP_STATUS_INVALID_ARGUMENT = 4,
  RP_STATUS_PANIC = 5,
} RpStatus;

/**
 * Opaque certificate handle.
 */
typedef struct RpCertificate RpCertificate;

typedef struct RpProveOptions {
  uint64_t search_ceiling;
  uint32_t precision_bits;
  bool paper_faithful;
  bool tight;
  /**
   * Scan convergents in increasing order instead of trying the published
   * one first.
   */
  bool increasing_policy;
} RpProveOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static nul-terminated string.
 */
const char *rp_version(void);

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next library call on the same thread.
 */
const char *rp_last_error(void);

/**
 * Fill `opts` with the defaults of the CLI.
 */
RpStatus rp_prove_options_default(RpProveOptions *opts);

/**
 * Run the proof. `opts` may be null for defaults.
 *
 * On `RP_STATUS_OK` `*out` receives the certificate. On
 * `RP_STATUS_PROOF_INCOMPLETE` it receives the partial certificate when
 * every stage ran, and null otherwise.
 */
RpStatus rp_prove(const RpProveOptions *opts, RpCertificate **out);

void rp_certificate_free(RpCertificate *cert);

/**
 * Whether the certificate closes the proof; false for null.
 */
bool rp_certificate_proof_complete(const RpCertificate *cert);

/**
 * Reduced bound on n; 0 for null.
 */
uint64_t rp_certificate_final_bound(const RpCertificate *cert);

size_t rp_certificate_solution_count(const RpCertificate *cert);

/**
 * Decimal value and smallest index of solution `i`.
 */
RpStatus rp_certificate_solution(const RpCertificate *cert, size_t i, char **value_out, uint64_t *n_out);

/**
 * Canonical JSON (`text = false`) or the text report (`text = true`).
 */
RpStatus rp_certificate_report(const RpCertificate *cert, bool text, char **out);

/**
 * Exhaustive search over `n_min..=n_max` of the recurrence with initial
 * terms `t0, t1, t2`; writes a JSON array of solutions.
 */
RpStatus rp_search(uint64_t n_min, uint64_t n_max, uint64_t t0, uint64_t t1, uint64_t t2, char **out);

/**
 * Free a string returned by this library.
 */
void rp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REPDIGIT_PROVER_H */
