/*
 * cardioquant C API
 *
 * All functions return CqStatus (CQ_STATUS_OK = 0 on success) and write
 * results through out-parameters. On failure, cq_last_error_message()
 * returns a description valid until the next failing call on the same
 * thread. Handles (CqVolume*, CqQuantifyResult*) are opaque and must be
 * released with their cq_*_free function.
 */

#ifndef CARDIOQUANT_H
#define CARDIOQUANT_H

#pragma once

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Probability provider selector for cq_quantify_scar.
 */
typedef enum CqProvider {
  CQ_PROVIDER_TWO_SD = 0,
  CQ_PROVIDER_OTSU = 1,
  CQ_PROVIDER_EXTERNAL = 2,
} CqProvider;

/**
 * Status of a C API call; nonzero values follow the CLI exit-code classes.
 */
typedef enum CqStatus {
  CQ_STATUS_OK = 0,
  /**
   * Internal failure or invalid handle/pointer.
   */
  CQ_STATUS_ERROR = 1,
  /**
   * Malformed file or argument.
   */
  CQ_STATUS_FORMAT = 2,
  /**
   * Mismatched dimensions or lengths.
   */
  CQ_STATUS_SHAPE = 3,
  /**
   * An input that must be non-empty is empty.
   */
  CQ_STATUS_EMPTY_INPUT = 4,
} CqStatus;

/**
 * Opaque scar-quantification result handle.
 */
typedef struct CqQuantifyResult CqQuantifyResult;

/**
 * Opaque volume handle.
 */
typedef struct CqVolume CqVolume;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread. The pointer stays valid
 * until the next failing call on the same thread.
 */
const char *cq_last_error_message(void);

/**
 * Read a cqvol volume from its `.json` header path.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum CqStatus cq_volume_read(const char *path, struct CqVolume **out);

/**
 * Write a volume as a cqvol pair next to the given `.json` path.
 *
 * # Safety
 * `path` must be NUL-terminated; `vol` must be a live handle.
 */
enum CqStatus cq_volume_write(const char *path, const struct CqVolume *vol);

/**
 * Build a scalar volume from a dense array in x-fastest order.
 *
 * # Safety
 * `dims`/`spacing` point to 3 elements; `data` points to `len` elements.
 */
enum CqStatus cq_volume_create_scalar(const uint64_t *dims,
                                      const double *spacing,
                                      const double *data,
                                      uintptr_t len,
                                      struct CqVolume **out);

/**
 * Build a label volume from a dense array in x-fastest order.
 *
 * # Safety
 * `dims`/`spacing` point to 3 elements; `data` points to `len` elements.
 */
enum CqStatus cq_volume_create_label(const uint64_t *dims,
                                     const double *spacing,
                                     const uint8_t *data,
                                     uintptr_t len,
                                     struct CqVolume **out);

/**
 * Voxel count of a volume (0 on a null handle).
 *
 * # Safety
 * `vol` must be null or a live handle.
 */
uintptr_t cq_volume_len(const struct CqVolume *vol);

/**
 * Fetch dims (3 elements) and spacing (3 elements).
 *
 * # Safety
 * Out pointers must each point to 3 writable elements.
 */
enum CqStatus cq_volume_shape(const struct CqVolume *vol, uint64_t *dims_out, double *spacing_out);

/**
 * Copy scalar voxels into a caller buffer of `len == cq_volume_len`.
 *
 * # Safety
 * `out` must point to `len` writable elements.
 */
enum CqStatus cq_volume_copy_scalar(const struct CqVolume *vol, double *out, uintptr_t len);

/**
 * Copy label voxels into a caller buffer of `len == cq_volume_len`.
 *
 * # Safety
 * `out` must point to `len` writable elements.
 */
enum CqStatus cq_volume_copy_label(const struct CqVolume *vol, uint8_t *out, uintptr_t len);

/**
 * Release a volume handle (null is a no-op).
 *
 * # Safety
 * `vol` must be null or a handle obtained from this library, not yet freed.
 */
void cq_volume_free(struct CqVolume *vol);

/**
 * Z-score normalize a scalar volume.
 *
 * # Safety
 * Handles and out pointers as documented on the type.
 */
enum CqStatus cq_zscore_normalize(const struct CqVolume *vol, struct CqVolume **out);

/**
 * Keep the largest connected component of `label` (connectivity 6 or 26).
 *
 * # Safety
 * Handles and out pointers as documented on the type.
 */
enum CqStatus cq_largest_component(const struct CqVolume *vol,
                                   uint8_t label,
                                   uint32_t connectivity,
                                   struct CqVolume **out);

/**
 * Fill interior holes of a binary mask.
 *
 * # Safety
 * Handles and out pointers as documented on the type.
 */
enum CqStatus cq_fill_holes(const struct CqVolume *vol, struct CqVolume **out);

/**
 * Signed distance transform map of a binary mask; the result is a scalar
 * volume holding phi.
 *
 * # Safety
 * Handles and out pointers as documented on the type.
 */
enum CqStatus cq_signed_dtm(const struct CqVolume *mask, double beta, struct CqVolume **out);

/**
 * Dice overlap of two binary volumes.
 *
 * # Safety
 * Handles and out pointers as documented on the type.
 */
enum CqStatus cq_dice(const struct CqVolume *seg, const struct CqVolume *gd, double *out);

/**
 * Generalized Dice over a label list.
 *
 * # Safety
 * `labels` points to `n_labels` elements; handles as documented.
 */
enum CqStatus cq_gdice(const struct CqVolume *seg,
                       const struct CqVolume *gd,
                       const uint8_t *labels,
                       uintptr_t n_labels,
                       double *out);

/**
 * Hausdorff and average surface distance between the boundary voxels of two
 * binary masks (either out pointer may be null to skip it).
 *
 * # Safety
 * Handles and out pointers as documented on the type.
 */
enum CqStatus cq_surface_distances(const struct CqVolume *seg,
                                   const struct CqVolume *gd,
                                   double *hausdorff_out,
                                   double *asd_out);

/**
 * Run the scar-quantification pipeline. For `CQ_PROVIDER_EXTERNAL`, `probs`
 * must point to `n_probs` per-node probabilities (one per mesh vertex);
 * otherwise it may be null. `bins` only applies to the otsu provider.
 *
 * # Safety
 * Handles, arrays and out pointers as documented on the type.
 */
enum CqStatus cq_quantify_scar(const struct CqVolume *image,
                               const struct CqVolume *la_mask,
                               enum CqProvider provider,
                               const double *probs,
                               uintptr_t n_probs,
                               uintptr_t bins,
                               double lambda,
                               struct CqQuantifyResult **out);

/**
 * Number of surface vertices in a quantification result (0 on null).
 *
 * # Safety
 * `result` must be null or a live handle.
 */
uintptr_t cq_quantify_vertex_count(const struct CqQuantifyResult *result);

/**
 * Fraction of vertices labeled scar (NaN on null).
 *
 * # Safety
 * `result` must be null or a live handle.
 */
double cq_quantify_scar_fraction(const struct CqQuantifyResult *result);

/**
 * Copy the per-vertex labels (0/1) into a caller buffer.
 *
 * # Safety
 * `out` must point to `len` writable elements.
 */
enum CqStatus cq_quantify_copy_labels(const struct CqQuantifyResult *result,
                                      uint8_t *out,
                                      uintptr_t len);

/**
 * Write the surface mesh of a quantification result as Wavefront OBJ.
 *
 * # Safety
 * `path` must be NUL-terminated; `result` a live handle.
 */
enum CqStatus cq_quantify_write_obj(const struct CqQuantifyResult *result, const char *path);

/**
 * Release a quantification result (null is a no-op).
 *
 * # Safety
 * `result` must be null or a handle from this library, not yet freed.
 */
void cq_quantify_free(struct CqQuantifyResult *result);

/**
 * Characteristic-function distance between two batches (row-major M x n).
 *
 * # Safety
 * `zs` points to `ms*n` elements and `zt` to `mt*n` elements.
 */
enum CqStatus cq_cfd_point(const double *zs,
                           uintptr_t ms,
                           const double *zt,
                           uintptr_t mt,
                           uintptr_t n,
                           double a,
                           double *out);

/**
 * Sliced (per-coordinate) CF distance.
 *
 * # Safety
 * As for [`cq_cfd_point`].
 */
enum CqStatus cq_sliced_cfd(const double *zs,
                            uintptr_t ms,
                            const double *zt,
                            uintptr_t mt,
                            uintptr_t n,
                            double a,
                            double *out);

/**
 * Squared distance between batch means.
 *
 * # Safety
 * As for [`cq_cfd_point`].
 */
enum CqStatus cq_mean_loss(const double *zs,
                           uintptr_t ms,
                           const double *zt,
                           uintptr_t mt,
                           uintptr_t n,
                           double *out);

/**
 * Gaussian-kernel MMD; pass sigma <= 0 for the median-distance heuristic.
 *
 * # Safety
 * As for [`cq_cfd_point`].
 */
enum CqStatus cq_mmd_gaussian(const double *zs,
                              uintptr_t ms,
                              const double *zt,
                              uintptr_t mt,
                              uintptr_t n,
                              double sigma,
                              double *out);

/**
 * CORAL covariance distance.
 *
 * # Safety
 * As for [`cq_cfd_point`].
 */
enum CqStatus cq_coral_distance(const double *zs,
                                uintptr_t ms,
                                const double *zt,
                                uintptr_t mt,
                                uintptr_t n,
                                double *out);

/**
 * Closed-form L2 distance between two diagonal-Gaussian mixtures; set
 * `marginal` nonzero for the per-coordinate substitution.
 *
 * # Safety
 * Mean/variance arrays are row-major M x n.
 */
enum CqStatus cq_varda_distance(const double *zs_means,
                                const double *zs_vars,
                                uintptr_t ms,
                                const double *zt_means,
                                const double *zt_vars,
                                uintptr_t mt,
                                uintptr_t n,
                                uint32_t marginal,
                                double *out);

/**
 * Mean KL divergence of per-sample diagonal Gaussians to the standard
 * normal.
 *
 * # Safety
 * Mean/variance arrays are row-major M x n.
 */
enum CqStatus cq_kl_diag_to_std(const double *means,
                                const double *vars,
                                uintptr_t m,
                                uintptr_t n,
                                double *out);

/**
 * Run the embedded verification suite; returns `CQ_STATUS_OK` iff every
 * property family passes.
 */
enum CqStatus cq_selfcheck(uint64_t seed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CARDIOQUANT_H */
