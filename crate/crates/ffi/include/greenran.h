#ifndef GREENRAN_H
#define GREENRAN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GreenranStatus {
  GREENRAN_STATUS_OK = 0,
  /*
   A required pointer argument was NULL.
   */
  GREENRAN_STATUS_NULL_ARGUMENT = 1,
  /*
   Configuration text or a value failed parsing or validation.
   */
  GREENRAN_STATUS_INVALID_CONFIG = 2,
  /*
   A model argument lies outside its valid range.
   */
  GREENRAN_STATUS_OUT_OF_DOMAIN = 3,
  /*
   Reading or writing files failed.
   */
  GREENRAN_STATUS_IO = 4,
  /*
   Any other failure inside the simulator.
   */
  GREENRAN_STATUS_RUNTIME = 5,
  /*
   The simulator panicked; the handle involved should be discarded.
   */
  GREENRAN_STATUS_PANIC = 6,
} GreenranStatus;

typedef enum GreenranAlgorithm {
  GREENRAN_ALGORITHM_PROPOSED = 0,
  GREENRAN_ALGORITHM_REFERENCE = 1,
} GreenranAlgorithm;

typedef enum GreenranStationKind {
  GREENRAN_STATION_KIND_MBS = 0,
  GREENRAN_STATION_KIND_SCBS = 1,
} GreenranStationKind;

/*
 Opaque simulation configuration.
 */
typedef struct GreenranConfig GreenranConfig;

/*
 Opaque result of one continuous run.
 */
typedef struct GreenranRun GreenranRun;

/*
 Headline figures of a run. Energy efficiencies are Mb/s per joule of
 one tick (per-tick mean) and NaN when the group never drew power.
 */
typedef struct GreenranSummary {
  uint64_t duration_s;
  uint64_t tick_s;
  uint64_t n_users;
  uint64_t n_scbs;
  double mbs_radius_m;
  /*
   NaN without small cells.
   */
  double scbs_radius_m;
  double ee_scbs;
  double ee_mbs;
  double ee_total;
  double on_grid_kwh;
  double mbs_load_share;
  double outage_share;
  uint64_t final_served;
  uint64_t final_outage;
  uint64_t handovers;
} GreenranSummary;

/*
 Distribution of per-run shares over a static batch.
 */
typedef struct GreenranBatchSummary {
  uint64_t n_runs;
  double mbs_load_share_mean;
  double mbs_load_share_std;
  double mbs_load_share_min;
  double mbs_load_share_max;
  double outage_share_mean;
  double outage_share_std;
  double outage_share_min;
  double outage_share_max;
} GreenranBatchSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *greenran_version(void);

/*
 Message of the last failed call on this thread, or NULL. The pointer
 stays valid until the next failing call on the same thread.
 */
const char *greenran_last_error(void);

/*
 Creates the default configuration.

 # Safety
 `out` must be NULL or point to writable storage for a handle.
 */
enum GreenranStatus greenran_config_default(struct GreenranConfig **out);

/*
 Parses and validates a TOML configuration.

 # Safety
 `toml` must be NULL or a NUL-terminated string; `out` must be NULL or
 point to writable storage for a handle.
 */
enum GreenranStatus greenran_config_from_toml(const char *toml, struct GreenranConfig **out);

/*
 Releases a configuration. NULL is ignored.

 # Safety
 `cfg` must be NULL or a handle from this library not yet freed.
 */
void greenran_config_free(struct GreenranConfig *cfg);

/*
 Sets every random seed of the configuration.

 # Safety
 `cfg` must be NULL or a live configuration handle.
 */
enum GreenranStatus greenran_config_set_seed(struct GreenranConfig *cfg, uint64_t seed);

/*
 Sets the simulated duration in seconds. The configuration is left
 unchanged if the value is rejected.

 # Safety
 `cfg` must be NULL or a live configuration handle.
 */
enum GreenranStatus greenran_config_set_duration(struct GreenranConfig *cfg, uint64_t duration_s);

/*
 Sets the number of users.

 # Safety
 `cfg` must be NULL or a live configuration handle.
 */
enum GreenranStatus greenran_config_set_users(struct GreenranConfig *cfg, size_t n_users);

/*
 Writes the resolved configuration as TOML into `buf` (NUL-terminated,
 truncated to `cap` bytes) and its full length, without the NUL, into
 `len`. Pass `cap = 0` to query the length.

 # Safety
 `cfg` must be a live handle; `buf` must hold `cap` writable bytes (may
 be NULL when `cap` is 0); `len` must be NULL or writable.
 */
enum GreenranStatus greenran_config_to_toml(const struct GreenranConfig *cfg,
                                            char *buf,
                                            size_t cap,
                                            size_t *len);

/*
 Runs a continuous simulation in memory.

 # Safety
 `cfg` must be a live handle; `out` must point to writable storage.
 */
enum GreenranStatus greenran_simulate(const struct GreenranConfig *cfg,
                                      enum GreenranAlgorithm algorithm,
                                      struct GreenranRun **out);

/*
 Runs a continuous simulation and writes every CSV/JSON artifact and the
 manifest into `out_dir`. `out` may be NULL when the result is not needed.

 # Safety
 `cfg` must be a live handle; `out_dir` a NUL-terminated path; `out`
 NULL or writable.
 */
enum GreenranStatus greenran_simulate_to_dir(const struct GreenranConfig *cfg,
                                             enum GreenranAlgorithm algorithm,
                                             const char *out_dir,
                                             struct GreenranRun **out);

/*
 Copies the headline figures of a run.

 # Safety
 `run` must be a live handle; `out` must be writable.
 */
enum GreenranStatus greenran_run_summary(const struct GreenranRun *run,
                                         struct GreenranSummary *out);

/*
 Copies up to `cap` values of the windowed on-grid energy series (kWh)
 into `buf` and writes the series length into `len`.

 # Safety
 `run` must be a live handle; `buf` must hold `cap` doubles (may be NULL
 when `cap` is 0); `len` must be writable.
 */
enum GreenranStatus greenran_run_ongrid_series(const struct GreenranRun *run,
                                               double *buf,
                                               size_t cap,
                                               size_t *len);

/*
 Releases a run result. NULL is ignored.

 # Safety
 `run` must be NULL or a handle from this library not yet freed.
 */
void greenran_run_free(struct GreenranRun *run);

/*
 Placement-only runs with seeds `base_seed..base_seed + n_runs`.

 # Safety
 `cfg` must be a live handle; `out` must be writable.
 */
enum GreenranStatus greenran_batch(const struct GreenranConfig *cfg,
                                   uint64_t n_runs,
                                   uint64_t base_seed,
                                   enum GreenranAlgorithm algorithm,
                                   struct GreenranBatchSummary *out);

/*
 Peak data rate in bit/s over `n_prb` resource blocks under the
 configuration's rate model.

 # Safety
 `cfg` must be a live handle; `out_bps` must be writable.
 */
enum GreenranStatus greenran_max_data_rate(const struct GreenranConfig *cfg,
                                           uint32_t n_prb,
                                           double *out_bps);

/*
 RMa LOS path loss in dB.

 # Safety
 `out_db` must be writable.
 */
enum GreenranStatus greenran_path_loss_rma(double d2d_m,
                                           double carrier_ghz,
                                           double h_bs_m,
                                           double h_ue_m,
                                           double *out_db);

/*
 Coverage radius in meters of a station kind under the configuration's
 link budget.

 # Safety
 `cfg` must be a live handle; `out_m` must be writable.
 */
enum GreenranStatus greenran_coverage_radius(const struct GreenranConfig *cfg,
                                             enum GreenranStationKind kind,
                                             double *out_m);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GREENRAN_H */
