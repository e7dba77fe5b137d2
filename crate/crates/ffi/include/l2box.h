#ifndef L2BOX_H
#define L2BOX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum L2boxStatus {
  L2BOX_STATUS_OK = 0,
  L2BOX_STATUS_NULL_POINTER = 1,
  L2BOX_STATUS_INVALID_UTF8 = 2,
  L2BOX_STATUS_PARSE = 3,
  L2BOX_STATUS_INVALID_MATRIX = 4,
  L2BOX_STATUS_LENGTH_MISMATCH = 5,
  L2BOX_STATUS_NON_FINITE_LLR = 6,
  L2BOX_STATUS_INVALID_PARAMS = 7,
  L2BOX_STATUS_IO = 8,
  L2BOX_STATUS_PANIC = 9,
} L2boxStatus;

typedef enum L2boxMpVariant {
  L2BOX_MP_VARIANT_SUM_PRODUCT = 0,
  L2BOX_MP_VARIANT_MIN_SUM = 1,
  L2BOX_MP_VARIANT_NORMALIZED_MIN_SUM = 2,
} L2boxMpVariant;

typedef enum L2boxTermination {
  L2BOX_TERMINATION_CONVERGED = 0,
  L2BOX_TERMINATION_MAX_ITERS = 1,
  L2BOX_TERMINATION_EARLY_CODEWORD = 2,
} L2boxTermination;

/**
 * Opaque parity-check matrix.
 */
typedef struct L2boxCode L2boxCode;

typedef struct L2boxL2Params {
  double mu1;
  double mu2;
  double epsilon;
  size_t max_iters;
  bool early_exit_on_codeword;
} L2boxL2Params;

typedef struct L2boxPenalizedParams {
  double alpha;
  double mu;
  double epsilon;
  size_t max_iters;
  bool early_exit_on_codeword;
} L2boxPenalizedParams;

typedef struct L2boxMpParams {
  enum L2boxMpVariant variant;
  size_t max_iters;
  double normalization;
  double llr_clip;
} L2boxMpParams;

/**
 * Scalar part of a decode; the word itself goes to a caller buffer.
 */
typedef struct L2boxDecodeInfo {
  bool is_valid_codeword;
  size_t iterations;
  enum L2boxTermination termination;
  double wall_time;
  double objective;
} L2boxDecodeInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *l2box_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *l2box_version(void);

/**
 * Parses alist text.
 */
enum L2boxStatus l2box_code_from_alist(const char *text, struct L2boxCode **out);

/**
 * Loads a built-in code name (e.g. "regular96") or an alist file path.
 */
enum L2boxStatus l2box_code_load(const char *code_ref, struct L2boxCode **out);

/**
 * Builds a code from a row-major dense 0/1 matrix of `n_checks * n_vars` bytes.
 */
enum L2boxStatus l2box_code_from_dense(const uint8_t *dense,
                                       size_t n_checks,
                                       size_t n_vars,
                                       struct L2boxCode **out);

/**
 * Releases a handle; NULL is ignored.
 */
void l2box_code_free(struct L2boxCode *code);

/**
 * Block length N (0 for NULL).
 */
size_t l2box_code_n_vars(const struct L2boxCode *code);

/**
 * Number of checks M (0 for NULL).
 */
size_t l2box_code_n_checks(const struct L2boxCode *code);

/**
 * GF(2) rank of H (0 for NULL).
 */
size_t l2box_code_rank(const struct L2boxCode *code);

/**
 * Writes whether the `len`-bit word (bytes 0/1) satisfies every check.
 */
enum L2boxStatus l2box_code_is_codeword(const struct L2boxCode *code,
                                        const uint8_t *word,
                                        size_t len,
                                        bool *out);

struct L2boxL2Params l2box_l2_params_default(void);

struct L2boxPenalizedParams l2box_penalized_params_default(void);

struct L2boxMpParams l2box_mp_params_default(enum L2boxMpVariant variant);

/**
 * l2-box ADMM decode of `n` LLRs. `word_out` (may be NULL) receives N bytes.
 * `params` may be NULL for defaults.
 */
enum L2boxStatus l2box_decode_l2box(const struct L2boxCode *code,
                                    const double *llr,
                                    size_t n,
                                    const struct L2boxL2Params *params,
                                    uint8_t *word_out,
                                    struct L2boxDecodeInfo *info_out);

/**
 * Penalized ADMM-LP decode; see [`l2box_decode_l2box`] for the buffers.
 */
enum L2boxStatus l2box_decode_penalized(const struct L2boxCode *code,
                                        const double *llr,
                                        size_t n,
                                        const struct L2boxPenalizedParams *params,
                                        uint8_t *word_out,
                                        struct L2boxDecodeInfo *info_out);

/**
 * Message-passing decode; `params` may be NULL for sum-product defaults.
 */
enum L2boxStatus l2box_decode_mp(const struct L2boxCode *code,
                                 const double *llr,
                                 size_t n,
                                 const struct L2boxMpParams *params,
                                 uint8_t *word_out,
                                 struct L2boxDecodeInfo *info_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* L2BOX_H */
