#ifndef EWCG_H
#define EWCG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes, equal to the exit codes of the `ewcg` binary.
typedef enum EwcgStatus {
  EWCG_OK = 0,
  // Malformed spec, bad argument or null pointer.
  EWCG_ERR_INPUT = 2,
  // No valid coloring exists, or decoding is ambiguous.
  EWCG_ERR_INFEASIBLE = 3,
  // A configured budget was exceeded.
  EWCG_ERR_CAPACITY = 4,
  // Internal error, including a caught panic.
  EWCG_ERR_INTERNAL = 5,
} EwcgStatus;

// Opaque problem handle.
typedef struct EwcgProblem EwcgProblem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *ewcg_version(void);

// Message of the last failed call on this thread, or null. The pointer is
// valid until the next call into the library on the same thread.
const char *ewcg_last_error_message(void);

// Parses a JSON problem spec into a new handle stored in `*out`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum EwcgStatus ewcg_problem_from_json(const char *json, struct EwcgProblem **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `p` must come from [`ewcg_problem_from_json`] and not be freed twice.
void ewcg_problem_free(struct EwcgProblem *p);

// Overrides the block length `n`, fold `b`, palette size `a` and seed.
// Zero leaves `n` and `b` unchanged; `a == 0` picks the palette automatically.
//
// # Safety
// `p` must be a live handle.
enum EwcgStatus ewcg_problem_set_params(struct EwcgProblem *p,
                                        size_t n,
                                        size_t b,
                                        size_t a,
                                        uint64_t seed);

// Entropy in bits of the first source, `H(X1)`.
//
// # Safety
// `p` must be a live handle and `out` a valid pointer.
enum EwcgStatus ewcg_source_entropy(const struct EwcgProblem *p, double *out);

// Exact fractional chromatic number of the first characteristic graph
// (at the configured power) as `numerator / denominator`.
//
// # Safety
// `p` must be a live handle; `num` and `den` valid pointers.
enum EwcgStatus ewcg_fractional_chromatic(const struct EwcgProblem *p, int64_t *num, int64_t *den);

// Edge weights of both characteristic graphs as a JSON report.
//
// # Safety
// `p` must be a live handle and `out` a valid pointer.
enum EwcgStatus ewcg_weights_json(const struct EwcgProblem *p, char **out);

// Traditional and folded colorings as a JSON report.
//
// # Safety
// `p` must be a live handle and `out` a valid pointer.
enum EwcgStatus ewcg_color_json(const struct EwcgProblem *p, char **out);

// Rate region as a JSON report. When a budget stops the computation early
// the partial report is still written to `*out` and the capacity status is
// returned.
//
// # Safety
// `p` must be a live handle and `out` a valid pointer.
enum EwcgStatus ewcg_rates_json(const struct EwcgProblem *p, char **out);

// Simulates `blocks` source blocks through the encoder and decoder
// (0 uses the default count). `binning` is null or `"R1,R2,L"`.
//
// # Safety
// `p` must be a live handle, `binning` null or NUL-terminated, and `out` a
// valid pointer.
enum EwcgStatus ewcg_simulate_json(const struct EwcgProblem *p,
                                   size_t blocks,
                                   const char *binning,
                                   char **out);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be freed twice.
void ewcg_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EWCG_H */
