#ifndef BELLGAME_H
#define BELLGAME_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BgStatus {
  BG_STATUS_OK = 0,
  BG_STATUS_NULL_ARGUMENT = 1,
  BG_STATUS_INVALID_UTF8 = 2,
  BG_STATUS_SYNTAX = 3,
  BG_STATUS_VALIDATION = 4,
  BG_STATUS_UNSUPPORTED = 5,
  BG_STATUS_SOLVER = 6,
  BG_STATUS_PANIC = 7,
} BgStatus;

/**
 * A two-or-more party full-correlation Bell inequality.
 */
typedef struct BgCorrelation BgCorrelation;

/**
 * A nonlocal game.
 */
typedef struct BgGame BgGame;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *bg_last_error(void);

/**
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void bg_string_free(char *s);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum BgStatus bg_correlation_chsh(struct BgCorrelation **out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum BgStatus bg_correlation_gisin(size_t n, struct BgCorrelation **out);

/**
 * Parses a `bell correlation v1` document.
 *
 * # Safety
 * `text` must be a NUL-terminated string, `out` a valid pointer.
 */
enum BgStatus bg_correlation_parse(const char *text, struct BgCorrelation **out);

/**
 * # Safety
 * `h` must be a live handle, `out` a valid pointer.
 */
enum BgStatus bg_correlation_to_text(const struct BgCorrelation *h, char **out);

/**
 * Classical bound `C` by enumeration.
 *
 * # Safety
 * `h` must be a live handle, `out` a valid pointer.
 */
enum BgStatus bg_correlation_classical_bound(const struct BgCorrelation *h,
                                             uint64_t cap,
                                             double *out);

/**
 * Optimal quantum winning probability of the associated two-party XOR game.
 *
 * # Safety
 * `h` must be a live handle, `out` a valid pointer.
 */
enum BgStatus bg_correlation_xor_value(const struct BgCorrelation *h,
                                       size_t restarts,
                                       uint64_t seed,
                                       double *out);

/**
 * # Safety
 * `h` must be a live handle, `out` a valid pointer.
 */
enum BgStatus bg_correlation_to_game(const struct BgCorrelation *h, struct BgGame **out);

/**
 * # Safety
 * `h` must be null or a handle from this library not yet freed.
 */
void bg_correlation_free(struct BgCorrelation *h);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum BgStatus bg_game_three_qutrit(struct BgGame **out);

/**
 * Parses a `game v1` document.
 *
 * # Safety
 * `text` must be a NUL-terminated string, `out` a valid pointer.
 */
enum BgStatus bg_game_parse(const char *text, struct BgGame **out);

/**
 * # Safety
 * `h` must be a live handle, `out` a valid pointer.
 */
enum BgStatus bg_game_to_text(const struct BgGame *h, char **out);

/**
 * Maximum and minimum classical winning probabilities.
 *
 * # Safety
 * `h` must be a live handle, `max` and `min` valid pointers.
 */
enum BgStatus bg_game_classical_value(const struct BgGame *h,
                                      uint64_t cap,
                                      double *max,
                                      double *min);

/**
 * See-saw lower bound on the quantum winning probability with local
 * dimensions `dims[0..n_dims]`.
 *
 * # Safety
 * `h` must be a live handle, `dims` must point to `n_dims` values, `out`
 * must be a valid pointer.
 */
enum BgStatus bg_game_seesaw_value(const struct BgGame *h,
                                   const size_t *dims,
                                   size_t n_dims,
                                   size_t restarts,
                                   uint64_t seed,
                                   double *out);

/**
 * # Safety
 * `h` must be null or a handle from this library not yet freed.
 */
void bg_game_free(struct BgGame *h);

/**
 * Library version, a static string.
 */
const char *bg_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BELLGAME_H */
