#ifndef BMCARPET_H
#define BMCARPET_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define BMC_ABI_VERSION 1

typedef enum BmcStatus {
  BMC_STATUS_OK = 0,
  BMC_STATUS_NULL_POINTER = 1,
  BMC_STATUS_INVALID_SPEC = 2,
  BMC_STATUS_IO = 3,
  BMC_STATUS_DOMAIN = 4,
  BMC_STATUS_REGIME = 5,
  BMC_STATUS_UNIFORM_FIBRES = 6,
  BMC_STATUS_INVALID_ARGUMENT = 7,
  BMC_STATUS_SEARCH_FAILED = 8,
  BMC_STATUS_INTERNAL = 9,
} BmcStatus;

/**
 * Opaque carpet handle.
 */
typedef struct BmcCarpet BmcCarpet;

typedef struct BmcDims {
  double hausdorff;
  double box_dim;
  double gap;
  /**
   * `log m / log n`
   */
  double r;
  /**
   * `log(N/M)`
   */
  double c;
  double mean_log_n;
  size_t n_maps;
  size_t n_cols;
  bool uniform_fibres;
} BmcDims;

typedef struct BmcOracleReport {
  uint64_t k;
  uint64_t level_k;
  uint64_t k2;
  uint64_t level_k2;
  uint64_t window;
  double delta0;
  double s;
  double log10_bad_windows;
  double log10_good_count;
  double log10_bad_count;
  double log10_total_count;
  double log10_cost_bad;
  double log10_cost_good;
  double log10_cost_total;
  double bad_exponent;
  double asymptotic_bad_exponent;
} BmcOracleReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

uint32_t bmc_abi_version(void);

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next library call on the same thread.
 */
const char *bmc_last_error_message(void);

/**
 * Parses a JSON spec `{"m": .., "n": .., "digits": [[col, row], ..]}`.
 */
enum BmcStatus bmc_carpet_from_json(const char *json, struct BmcCarpet **out);

/**
 * Builds a carpet from `len` zero-based `(cols[i], rows[i])` digits.
 */
enum BmcStatus bmc_carpet_from_digits(int64_t m,
                                      int64_t n,
                                      const int64_t *cols,
                                      const int64_t *rows,
                                      size_t len,
                                      struct BmcCarpet **out);

/**
 * Releases a handle; NULL is ignored.
 */
void bmc_carpet_free(struct BmcCarpet *carpet);

enum BmcStatus bmc_dims(const struct BmcCarpet *carpet, struct BmcDims *out);

/**
 * `I(x)` and the maximizing `λ` (`+∞` at `x = log N_max`). `lambda_star` may be NULL.
 */
enum BmcStatus bmc_rate(const struct BmcCarpet *carpet,
                        double x,
                        double *value,
                        double *lambda_star);

enum BmcStatus bmc_delta0(const struct BmcCarpet *carpet, double theta, double *out);

/**
 * Two-scale upper bound at `θ ∈ [0, 1]`.
 */
enum BmcStatus bmc_upper_bound(const struct BmcCarpet *carpet, double theta, double *out);

enum BmcStatus bmc_upper_slope_at_one(const struct BmcCarpet *carpet, double *out);

/**
 * Three-scale upper bound at `θ ∈ [log_n m, 1)` with the default search grid.
 */
enum BmcStatus bmc_improved_upper(const struct BmcCarpet *carpet, double theta, double *out);

/**
 * Measure-based lower bound; `u_star` (nullable) receives the best mixing weight.
 */
enum BmcStatus bmc_lower_thm(const struct BmcCarpet *carpet,
                             double theta,
                             double *out,
                             double *u_star);

enum BmcStatus bmc_lower_linear(const struct BmcCarpet *carpet, double theta, double *out);

enum BmcStatus bmc_lower_ffk(const struct BmcCarpet *carpet, double theta, double *out);

enum BmcStatus bmc_lower_envelope(const struct BmcCarpet *carpet, double theta, double *out);

/**
 * `L(k)`: the largest `ℓ` with `n^ℓ ≤ m^k`.
 */
uint64_t bmc_level_l(uint64_t m, uint64_t n, uint64_t k);

/**
 * Oracle report at level `k`. `theta` is a string such as `"3/4"` or `"0.75"`;
 * `s` and `delta0` may be NULL to use their defaults.
 */
enum BmcStatus bmc_oracle(const struct BmcCarpet *carpet,
                          uint64_t k,
                          const char *theta,
                          const double *s,
                          const double *delta0,
                          struct BmcOracleReport *out);

/**
 * Curve CSV over a `grid`-point `θ` grid. Release `*out` with `bmc_string_free`.
 */
enum BmcStatus bmc_curve_csv(const struct BmcCarpet *carpet,
                             size_t grid,
                             bool include_three_scale,
                             char **out);

/**
 * Releases a string returned by this library; NULL is ignored.
 */
void bmc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BMCARPET_H */
