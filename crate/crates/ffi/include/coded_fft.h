#ifndef CODED_FFT_H
#define CODED_FFT_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

// Result of every fallible call.
typedef enum CfftStatus {
  CFFT_STATUS_OK = 0,
  CFFT_STATUS_NULL_POINTER = 1,
  CFFT_STATUS_INVALID_ARGUMENT = 2,
  CFFT_STATUS_INVALID_FIELD = 3,
  CFFT_STATUS_ROOT_UNAVAILABLE = 4,
  CFFT_STATUS_INDIVISIBLE_LENGTH = 5,
  CFFT_STATUS_INFEASIBLE_THRESHOLD = 6,
  CFFT_STATUS_INSUFFICIENT_SHARES = 7,
  CFFT_STATUS_DUPLICATE_SHARE = 8,
  CFFT_STATUS_WORKER_OUT_OF_RANGE = 9,
  CFFT_STATUS_LENGTH_MISMATCH = 10,
  CFFT_STATUS_INAPPLICABLE_BASELINE = 11,
  CFFT_STATUS_NOT_MDS = 12,
  CFFT_STATUS_INTERNAL = 13,
} CfftStatus;

typedef enum CfftStrategyKind {
  CFFT_STRATEGY_KIND_CODED = 0,
  CFFT_STRATEGY_KIND_SHORT_DOT = 1,
  CFFT_STRATEGY_KIND_REPETITION = 2,
} CfftStrategyKind;

// Coded strategy over the complex numbers.
typedef struct CfftComplexStrategy CfftComplexStrategy;

// Coded strategy over GF(p).
typedef struct CfftPrimeStrategy CfftPrimeStrategy;

// Complex number laid out as two doubles, `re` first.
typedef struct CfftComplex {
  double re;
  double im;
} CfftComplex;

// Plans a length-`s` transform over GF(`modulus`) split into `m` parts for
// `n_workers` workers. On success `*out` owns a new handle.
//
// # Safety
// `out` must be valid for one pointer write.
enum CfftStatus cfft_prime_strategy_new(uint64_t modulus,
                                        size_t s,
                                        size_t m,
                                        size_t n_workers,
                                        struct CfftPrimeStrategy **out);

// # Safety
// `handle` must be null or come from `cfft_prime_strategy_new`, and must
// not be used afterwards.
void cfft_prime_strategy_free(struct CfftPrimeStrategy *handle);

// Number of results needed to decode; 0 for a null handle.
//
// # Safety
// `handle` must be null or a live handle.
size_t cfft_prime_strategy_threshold(const struct CfftPrimeStrategy *handle);

// Elements per share and per worker result; 0 for a null handle.
//
// # Safety
// `handle` must be null or a live handle.
size_t cfft_prime_strategy_share_len(const struct CfftPrimeStrategy *handle);

// Writes `n_workers * share_len` residues, share `i` at offset
// `i * share_len`.
//
// # Safety
// `x` must hold `x_len` readable elements and `shares` `shares_len`
// writable ones.
enum CfftStatus cfft_prime_encode(const struct CfftPrimeStrategy *handle,
                                  const uint64_t *x,
                                  size_t x_len,
                                  uint64_t *shares,
                                  size_t shares_len);

// Transforms one share of `share_len` residues.
//
// # Safety
// `share` and `result` must each hold `len` elements.
enum CfftStatus cfft_prime_worker_compute(const struct CfftPrimeStrategy *handle,
                                          const uint64_t *share,
                                          uint64_t *result,
                                          size_t len);

// Decodes from `count` worker results stored back to back in `results`,
// where result `i` came from worker `workers[i]`. Writes `s` elements.
//
// # Safety
// `workers` must hold `count` elements, `results` `count * share_len`, and
// `out` `out_len`.
enum CfftStatus cfft_prime_decode(const struct CfftPrimeStrategy *handle,
                                  const size_t *workers,
                                  const uint64_t *results,
                                  size_t count,
                                  uint64_t *out,
                                  size_t out_len);

// Uncoded reference transform over GF(`modulus`); `x` and `out` hold `len`
// elements.
//
// # Safety
// `x` and `out` must each hold `len` elements.
enum CfftStatus cfft_prime_dft(uint64_t modulus, const uint64_t *x, uint64_t *out, size_t len);

// Plans a length-`s` complex transform. `tolerance` is the relative
// equality tolerance used for singularity checks; pass 0 for the default.
//
// # Safety
// `out` must be valid for one pointer write.
enum CfftStatus cfft_complex_strategy_new(double tolerance,
                                          size_t s,
                                          size_t m,
                                          size_t n_workers,
                                          struct CfftComplexStrategy **out);

// # Safety
// `handle` must be null or come from `cfft_complex_strategy_new`, and must
// not be used afterwards.
void cfft_complex_strategy_free(struct CfftComplexStrategy *handle);

// # Safety
// `handle` must be null or a live handle.
size_t cfft_complex_strategy_threshold(const struct CfftComplexStrategy *handle);

// # Safety
// `handle` must be null or a live handle.
size_t cfft_complex_strategy_share_len(const struct CfftComplexStrategy *handle);

// # Safety
// As for `cfft_prime_encode`.
enum CfftStatus cfft_complex_encode(const struct CfftComplexStrategy *handle,
                                    const struct CfftComplex *x,
                                    size_t x_len,
                                    struct CfftComplex *shares,
                                    size_t shares_len);

// # Safety
// As for `cfft_prime_worker_compute`.
enum CfftStatus cfft_complex_worker_compute(const struct CfftComplexStrategy *handle,
                                            const struct CfftComplex *share,
                                            struct CfftComplex *result,
                                            size_t len);

// # Safety
// As for `cfft_prime_decode`.
enum CfftStatus cfft_complex_decode(const struct CfftComplexStrategy *handle,
                                    const size_t *workers,
                                    const struct CfftComplex *results,
                                    size_t count,
                                    struct CfftComplex *out,
                                    size_t out_len);

// # Safety
// `x` and `out` must each hold `len` elements.
enum CfftStatus cfft_complex_dft(const struct CfftComplex *x, struct CfftComplex *out, size_t len);

// Recovery threshold of a strategy family for `n_workers` and `m` parts.
//
// # Safety
// `out` must be valid for one write.
enum CfftStatus cfft_baseline_threshold(enum CfftStrategyKind kind,
                                        size_t n_workers,
                                        size_t m,
                                        size_t *out);

// Message of the last failing call on this thread, or null if none. The
// pointer stays valid until the next failing call on the same thread.
const char *cfft_last_error(void);

#endif  /* CODED_FFT_H */
