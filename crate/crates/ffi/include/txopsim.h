#ifndef TXOPSIM_H
#define TXOPSIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TxopsimPowerPolicy {
  /**
   * Every AP transmits at the maximum power level.
   */
  TXOPSIM_POWER_POLICY_FIXED = 0,
  /**
   * Every configured power level is considered.
   */
  TXOPSIM_POWER_POLICY_VARIABLE = 1,
} TxopsimPowerPolicy;

/**
 * Result of a C API call.
 */
typedef enum TxopsimStatus {
  TXOPSIM_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  TXOPSIM_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8 or an index was out of range.
   */
  TXOPSIM_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Invalid configuration or override.
   */
  TXOPSIM_STATUS_CONFIG = 3,
  /**
   * A scenario document failed to parse or validate.
   */
  TXOPSIM_STATUS_SCENARIO = 4,
  /**
   * Evaluation failed (for example an unreachable station).
   */
  TXOPSIM_STATUS_RUNTIME = 5,
  /**
   * An internal panic was caught.
   */
  TXOPSIM_STATUS_PANIC = 6,
} TxopsimStatus;

/**
 * Opaque simulation configuration.
 */
typedef struct TxopsimConfig TxopsimConfig;

/**
 * Opaque deployment (AP and station positions with association).
 */
typedef struct TxopsimDeployment TxopsimDeployment;

/**
 * Throughput of the three access modes on one deployment.
 */
typedef struct TxopsimReport {
  double ncmap_mbps;
  double ctdma_mbps;
  double ctdma_sr_mbps;
  /**
   * Gains over nc-MAP in percent.
   */
  double gain_ctdma_pct;
  double gain_ctdma_sr_pct;
  double txop_ctdma_us;
  double txop_ctdma_sr_us;
  size_t ctdma_sr_slots;
} TxopsimReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Package version of the library. The string is static; do not free it.
 */
const char *txopsim_version(void);

/**
 * Message describing the most recent failure on the calling thread (empty if
 * none). Valid until the next failing call on this thread; do not free.
 */
const char *txopsim_last_error(void);

/**
 * Creates a configuration with every default value.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for a handle.
 */
enum TxopsimStatus txopsim_config_new_default(struct TxopsimConfig **out);

/**
 * Parses a TOML configuration document; omitted fields take defaults.
 *
 * # Safety
 * `toml` must be a nul-terminated string and `out` a valid pointer.
 */
enum TxopsimStatus txopsim_config_from_toml(const char *toml, struct TxopsimConfig **out);

/**
 * Applies a `section.key=value` override. On failure the configuration is
 * left unchanged.
 *
 * # Safety
 * `config` must be a live handle and `assignment` a nul-terminated string.
 */
enum TxopsimStatus txopsim_config_set(struct TxopsimConfig *config, const char *assignment);

/**
 * Releases a configuration. Null is ignored.
 *
 * # Safety
 * `config` must be null or a handle not yet freed.
 */
void txopsim_config_free(struct TxopsimConfig *config);

/**
 * Draws a random deployment using the configuration's scenario section with
 * the given AP count and seed.
 *
 * # Safety
 * `config` must be a live handle and `out` a valid pointer.
 */
enum TxopsimStatus txopsim_deployment_generate(const struct TxopsimConfig *config,
                                               size_t num_aps,
                                               uint64_t seed,
                                               struct TxopsimDeployment **out);

/**
 * Loads a scenario document (TOML with `aps` and `stas` arrays).
 *
 * # Safety
 * `toml` must be a nul-terminated string and `out` a valid pointer.
 */
enum TxopsimStatus txopsim_deployment_from_toml(const char *toml, struct TxopsimDeployment **out);

/**
 * Releases a deployment. Null is ignored.
 *
 * # Safety
 * `deployment` must be null or a handle not yet freed.
 */
void txopsim_deployment_free(struct TxopsimDeployment *deployment);

/**
 * Number of APs, or 0 for a null handle.
 *
 * # Safety
 * `deployment` must be null or a live handle.
 */
size_t txopsim_deployment_num_aps(const struct TxopsimDeployment *deployment);

/**
 * Number of stations, or 0 for a null handle.
 *
 * # Safety
 * `deployment` must be null or a live handle.
 */
size_t txopsim_deployment_num_stas(const struct TxopsimDeployment *deployment);

/**
 * Position of station `sta` in meters and the index of its AP.
 *
 * # Safety
 * `deployment` must be a live handle; the output pointers must be valid.
 */
enum TxopsimStatus txopsim_deployment_sta(const struct TxopsimDeployment *deployment,
                                          size_t sta,
                                          double *x,
                                          double *y,
                                          size_t *ap);

/**
 * Evaluates nc-MAP, c-TDMA and c-TDMA/SR on a deployment.
 *
 * # Safety
 * `config` and `deployment` must be live handles; `report` must be valid.
 */
enum TxopsimStatus txopsim_evaluate(const struct TxopsimConfig *config,
                                    const struct TxopsimDeployment *deployment,
                                    enum TxopsimPowerPolicy policy,
                                    struct TxopsimReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TXOPSIM_H */
