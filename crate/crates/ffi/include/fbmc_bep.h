#ifndef FBMC_BEP_H
#define FBMC_BEP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Passed as `kmax` to keep every entry of the interference set.
#define FBMC_KMAX_ALL SIZE_MAX



#define FBMC_CHANNEL_AWGN 0

#define FBMC_CHANNEL_RAYLEIGH 1

#define FBMC_FORM_APPROX 0

#define FBMC_FORM_EXACT 1

typedef enum FbmcStatus {
  FBMC_STATUS_OK = 0,
  FBMC_STATUS_NULL_POINTER = 1,
  FBMC_STATUS_INVALID_ARGUMENT = 2,
  FBMC_STATUS_UNSUPPORTED_FILTER = 3,
  FBMC_STATUS_BUDGET_EXCEEDED = 4,
  FBMC_STATUS_INTERNAL = 5,
} FbmcStatus;

// Opaque prototype filter.
typedef struct FbmcFilter FbmcFilter;

// Opaque, possibly truncated, interference table.
typedef struct FbmcTable FbmcTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. The pointer
// stays valid until the next failing call on the same thread.
const char *fbmc_last_error(void);

// Mirabbasi-Martin filter with `overlap` in {3, 4}.
//
// # Safety
// `out` must be valid for writes.
enum FbmcStatus fbmc_filter_martin(size_t overlap, size_t subcarriers, struct FbmcFilter **out);

// Extended Gaussian filter with spreading factor `alpha`.
//
// # Safety
// `out` must be valid for writes.
enum FbmcStatus fbmc_filter_egf(double alpha,
                                size_t overlap,
                                size_t subcarriers,
                                struct FbmcFilter **out);

// Rectangular filter of `subcarriers` taps.
//
// # Safety
// `out` must be valid for writes.
enum FbmcStatus fbmc_filter_rect(size_t subcarriers, struct FbmcFilter **out);

// Filter from `len` caller-supplied taps, scaled to unit energy.
//
// # Safety
// `taps` must point to `len` readable doubles and `out` must be valid for writes.
enum FbmcStatus fbmc_filter_from_taps(const double *taps,
                                      size_t len,
                                      size_t overlap,
                                      struct FbmcFilter **out);

// Number of taps, or 0 for a null handle.
//
// # Safety
// `filter` must be null or a live handle.
size_t fbmc_filter_len(const struct FbmcFilter *filter);

// Copies up to `capacity` taps into `buffer`; `written` receives the count.
//
// # Safety
// `filter` must be a live handle, `buffer` must hold `capacity` doubles and
// `written` must be valid for writes.
enum FbmcStatus fbmc_filter_taps(const struct FbmcFilter *filter,
                                 double *buffer,
                                 size_t capacity,
                                 size_t *written);

// # Safety
// `filter` must be null or a handle not yet freed.
void fbmc_filter_free(struct FbmcFilter *filter);

// Interference set of `filter` on an `subcarriers`-wide grid, truncated to
// the `kmax` strongest entries (`FBMC_KMAX_ALL` keeps them all).
//
// # Safety
// `filter` must be a live handle and `out` must be valid for writes.
enum FbmcStatus fbmc_table_new(const struct FbmcFilter *filter,
                               size_t subcarriers,
                               size_t kmax,
                               struct FbmcTable **out);

// Number of entries, or 0 for a null handle.
//
// # Safety
// `table` must be null or a live handle.
size_t fbmc_table_len(const struct FbmcTable *table);

// Signal-to-interference ratio of the table in dB.
//
// # Safety
// `table` must be a live handle and `out` must be valid for writes.
enum FbmcStatus fbmc_table_sir(const struct FbmcTable *table, double *out);

// # Safety
// `table` must be null or a handle not yet freed.
void fbmc_table_free(struct FbmcTable *table);

// Size of the interference set for `subcarriers` and a filter of
// `filter_len` taps.
size_t fbmc_set_size(size_t subcarriers, size_t filter_len);

// Single-carrier Gray `order`-PAM bit error probability at `gamma_b`
// (linear Eb/N0).
//
// # Safety
// `out` must be valid for writes.
enum FbmcStatus fbmc_pam_bep(size_t order, int channel, int kind, double gamma_b, double *out);

// CP-OFDM square-QAM bit error probability.
//
// # Safety
// `out` must be valid for writes.
enum FbmcStatus fbmc_ofdm_bep(size_t qam_order,
                              size_t subcarriers,
                              size_t cp,
                              int channel,
                              int kind,
                              double gamma_b,
                              double *out);

// FBMC/OQAM bit error probability with `order`-PAM per real dimension and
// the interference in `table`. Fails with `BudgetExceeded` when the table
// needs more than `budget` offset combinations.
//
// # Safety
// `table` must be a live handle and `out` must be valid for writes.
enum FbmcStatus fbmc_fbmc_bep(size_t order,
                              const struct FbmcTable *table,
                              int channel,
                              int kind,
                              double gamma_b,
                              uint64_t budget,
                              double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FBMC_BEP_H */
