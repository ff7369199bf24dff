/* C interface for the risdoa estimation pipeline.
 *
 * Usage: create a pipeline handle, optionally set angles and the error
 * clip, then call risdoa_pipeline_run once per Monte-Carlo trial. All
 * functions returning risdoa_status set a thread-local message readable
 * via risdoa_last_error() on failure.
 */

#ifndef RISDOA_H
#define RISDOA_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum risdoa_status {
  RISDOA_OK = 0,
  RISDOA_NULL_POINTER = 1,
  RISDOA_INVALID_ARGUMENT = 2,
  RISDOA_RANK_DEFICIENT = 3,
  RISDOA_IO_ERROR = 4,
  RISDOA_INTERNAL_ERROR = 5,
} risdoa_status;

/* Opaque pipeline configuration handle. */
typedef struct risdoa_pipeline risdoa_pipeline;

/* Creates a pipeline for a half-wavelength ULA scene. Source angles
 * default to an even spread over (-60, 60) degrees; override them with
 * risdoa_pipeline_set_angles. Returns NULL on invalid dimensions
 * (num_sources < num_ris, num_sources < num_slots, and
 * num_slots >= num_ris are required). */
risdoa_pipeline *risdoa_pipeline_new(size_t num_antennas,
                                     size_t num_ris,
                                     size_t num_sources,
                                     size_t num_slots,
                                     double snr_db,
                                     uint64_t seed);

/* Frees a handle; NULL is a no-op. */
void risdoa_pipeline_free(risdoa_pipeline *p);

/* Sets the true source directions in degrees, each in [-90, 90) and
 * pairwise distinct; len must equal the source count. */
risdoa_status risdoa_pipeline_set_angles(risdoa_pipeline *p,
                                         const double *doas_deg,
                                         size_t len);

/* Per-source absolute error clip in degrees for the reported RMSE
 * (default 4.0); must be positive. */
risdoa_status risdoa_pipeline_set_clip(risdoa_pipeline *p, double clip_deg);

/* Runs one synthetic trial and writes the estimated directions,
 * ascending, into est_deg_out[0..len); len must equal the source count.
 * rmse_out may be NULL. Trials are independently seeded from the
 * pipeline seed and the trial index, so a given (handle config, trial)
 * pair is reproducible. */
risdoa_status risdoa_pipeline_run(risdoa_pipeline *p,
                                  uint64_t trial,
                                  double *est_deg_out,
                                  size_t len,
                                  double *rmse_out);

/* Message for the most recent failure on the calling thread. Valid
 * until the next failing call on the same thread. */
const char *risdoa_last_error(void);

/* Static name for a status code. */
const char *risdoa_status_message(risdoa_status status);

/* Library version string. */
const char *risdoa_version(void);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RISDOA_H */
