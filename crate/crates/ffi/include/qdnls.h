#ifndef QDNLS_H
#define QDNLS_H

/* Generated with cbindgen:0.26.0 */

/* Generated by cbindgen from qdnls-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Admissibility condition selector for `qdnls_modulation_scan`.
typedef enum QdnlsScanCondition {
  QDNLS_SCAN_CONDITION_UNCONSTRAINED = 0,
  QDNLS_SCAN_CONDITION_THETA_POSITIVE = 1,
  QDNLS_SCAN_CONDITION_SEPARATED = 2,
} QdnlsScanCondition;

// Status codes returned by every fallible call.
typedef enum QdnlsStatus {
  QDNLS_STATUS_OK = 0,
  QDNLS_STATUS_NULL_POINTER = 1,
  QDNLS_STATUS_INVALID_ARGUMENT = 2,
  QDNLS_STATUS_CONFIG_ERROR = 3,
  // The run aborted on the numerical blow-up signal (artifacts were kept).
  QDNLS_STATUS_BLOWUP = 4,
  QDNLS_STATUS_INCONCLUSIVE_FIT = 5,
  QDNLS_STATUS_VERIFY_FAILED = 6,
  QDNLS_STATUS_IO_ERROR = 7,
  QDNLS_STATUS_UTF8_ERROR = 8,
  QDNLS_STATUS_PANIC = 9,
} QdnlsStatus;

// Opaque dispersion-coefficient handle.
typedef struct QdnlsParams QdnlsParams;

// Derived coefficient algebra, plain-old-data for easy binding.
typedef struct QdnlsResonance {
  double theta;
  double kappa;
  // (alpha - gamma) * (beta + gamma)
  double acg_bc;
  // Scaling-critical Sobolev exponent d/2 - 1.
  double s_critical;
  uint8_t same_sign;
  uint8_t has_m_factor;
  // Set when theta < 0 and alpha != gamma; then m_plus != m_minus.
  uint8_t has_m_pair;
  double m_factor;
  double m_plus;
  double m_minus;
} QdnlsResonance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates a coefficient handle. Fails unless alpha, beta, gamma are nonzero
// finite and dim is 1 or 2.
enum QdnlsStatus qdnls_params_new(double alpha,
                                  double beta,
                                  double gamma,
                                  uint32_t dim,
                                  struct QdnlsParams **out);

// Releases a handle created by `qdnls_params_new`. Null is a no-op.
void qdnls_params_free(struct QdnlsParams *params);

// theta = beta*gamma - alpha*gamma - alpha*beta (division-free form).
enum QdnlsStatus qdnls_theta(const struct QdnlsParams *params, double *out);

// kappa = (alpha - beta)(alpha - gamma)(beta + gamma).
enum QdnlsStatus qdnls_kappa(const struct QdnlsParams *params, double *out);

// Fills the full derived algebra of the handle.
enum QdnlsStatus qdnls_resonance(const struct QdnlsParams *params, struct QdnlsResonance *out);

// Writes the applicable-statement lines ("T1.4(iii): s ≥ 0.5", one per
// line, UTF-8, NUL-terminated) into `buf`. `written` receives the full
// length including the terminator; if it exceeds `cap` the text is
// truncated but the status is still Ok.
enum QdnlsStatus qdnls_regime_labels(const struct QdnlsParams *params,
                                     char *buf,
                                     uintptr_t cap,
                                     uintptr_t *written);

// Lattice scan of min |sigma1|xi1|^2 + sigma2|xi2|^2 + sigma3|xi3|^2| /
// max_j |xi_j|^2 over xi1 + xi2 + xi3 = 0. `ratio` is only read for the
// Separated condition (and must be >= 4).
enum QdnlsStatus qdnls_modulation_scan(double sigma1,
                                       double sigma2,
                                       double sigma3,
                                       uint32_t dim,
                                       enum QdnlsScanCondition condition,
                                       double ratio,
                                       uint32_t extent,
                                       double step,
                                       double *out_min_ratio);

// Parses a strict-JSON run configuration and executes it; artifacts land in
// the configuration's out_dir exactly as with the CLI.
enum QdnlsStatus qdnls_run_json(const char *config_json);

// Copies the last error message (NUL-terminated, possibly truncated) into
// `buf` and returns the message's full length in bytes.
uintptr_t qdnls_last_error(char *buf, uintptr_t cap);

// Library version as a static NUL-terminated string.
const char *qdnls_version(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* QDNLS_H */
