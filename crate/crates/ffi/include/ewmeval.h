/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef EWMEVAL_H
#define EWMEVAL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  // cost divided by the warping path length
  EWM_NDTW_NORM_PATH_LENGTH = 0,
  // cost divided by the sum of both sequence lengths
  EWM_NDTW_NORM_SUM_OF_LENGTHS = 1,
} EwmNdtwNorm;

typedef enum {
  // speed and acceleration magnitudes
  EWM_DYN_MODE_MAGNITUDE = 0,
  // per-axis components, distances summed over axes
  EWM_DYN_MODE_PER_AXIS = 1,
} EwmDynMode;

// Result code of every fallible call.
typedef enum {
  EWM_STATUS_OK = 0,
  EWM_STATUS_NULL_POINTER = 1,
  EWM_STATUS_INVALID_ARGUMENT = 2,
  EWM_STATUS_EMPTY_INPUT = 3,
  EWM_STATUS_DIMENSION_MISMATCH = 4,
  EWM_STATUS_TOO_SHORT = 5,
  EWM_STATUS_IO = 6,
  EWM_STATUS_PARSE = 7,
  EWM_STATUS_INVALID_FORMAT = 8,
  EWM_STATUS_OUT_OF_RANGE = 9,
  EWM_STATUS_INTERNAL = 10,
} EwmStatus;

typedef enum {
  EWM_EMBEDDING_KIND_PATCH_PER_FRAME = 0,
  EWM_EMBEDDING_KIND_GLOBAL_VIDEO = 1,
  EWM_EMBEDDING_KIND_STEP_TEXT = 2,
  EWM_EMBEDDING_KIND_GLOBAL_TEXT = 3,
} EwmEmbeddingKind;

// Opaque embedding tensor handle.
typedef struct EwmEmbedding EwmEmbedding;

// Opaque trajectory handle.
typedef struct EwmTrajectory EwmTrajectory;

// Motion scoring parameters. `ewm_motion_config_default` fills the
// defaults.
typedef struct {
  double alpha;
  double beta;
  double epsilon;
  EwmNdtwNorm ndtw_norm;
  EwmDynMode dyn_mode;
} EwmMotionConfig;

typedef struct {
  double hsd;
  double ndtw;
  double dyn_score;
  double raw_hausdorff;
  double raw_ndtw;
} EwmMotionScores;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *ewm_last_error(void);

// Library version as a static NUL-terminated string.
const char *ewm_version(void);

EwmMotionConfig ewm_motion_config_default(void);

// Builds a trajectory from `n` points of `dim` (2 or 3) interleaved
// coordinates. `frame_rate` must be positive.
EwmStatus ewm_trajectory_new(const double *coords,
                             size_t n,
                             size_t dim,
                             double frame_rate,
                             EwmTrajectory **out_handle);

// Loads a CSV or JSON trajectory file.
EwmStatus ewm_trajectory_load(const char *path, EwmTrajectory **out_handle);

// Number of points; 0 for a null handle.
size_t ewm_trajectory_len(const EwmTrajectory *t);

// Coordinates per point (2 or 3); 0 for a null handle.
size_t ewm_trajectory_dim(const EwmTrajectory *t);

// Releases a trajectory. Null is ignored.
void ewm_trajectory_free(EwmTrajectory *t);

// Symmetric Hausdorff distance.
EwmStatus ewm_hausdorff(const EwmTrajectory *g, const EwmTrajectory *p, double *out_distance);

// Unnormalised DTW cost and warping path length.
EwmStatus ewm_dtw(const EwmTrajectory *g,
                  const EwmTrajectory *p,
                  double *out_cost,
                  size_t *out_path_len);

// `1 / (nDTW + epsilon)`.
EwmStatus ewm_ndtw_score(const EwmTrajectory *g,
                         const EwmTrajectory *p,
                         EwmNdtwNorm normalization,
                         double epsilon,
                         double *out_score);

// Dynamic consistency score. A null `cfg` uses the defaults.
EwmStatus ewm_dyn_score(const EwmTrajectory *g,
                        const EwmTrajectory *p,
                        const EwmMotionConfig *cfg,
                        double *out_score);

// All motion scores of `p` against `g`. A null `cfg` uses the defaults.
EwmStatus ewm_motion_scores(const EwmTrajectory *g,
                            const EwmTrajectory *p,
                            const EwmMotionConfig *cfg,
                            EwmMotionScores *out_scores);

// 1-D Wasserstein distance between two sample sets.
EwmStatus ewm_wasserstein_1d(const double *u,
                             size_t nu,
                             const double *w,
                             size_t nw,
                             double *out_distance);

// Candidate closest to `g` in Hausdorff distance (lowest index on ties)
// and its scores. `out_scores` may be null.
EwmStatus ewm_best_of_n(const EwmTrajectory *g,
                        const EwmTrajectory *const *candidates,
                        size_t n,
                        const EwmMotionConfig *cfg,
                        size_t *out_index,
                        EwmMotionScores *out_scores);

// Smoothed BLEU of `candidate` against `reference` up to order `max_n`.
EwmStatus ewm_bleu(const char *candidate, const char *reference, size_t max_n, double *out_score);

// Builds a tensor from row-major `data` of `len` floats and `rank` dims.
EwmStatus ewm_embedding_new(EwmEmbeddingKind kind,
                            const size_t *shape,
                            size_t rank,
                            const float *data,
                            size_t len,
                            EwmEmbedding **out_handle);

// Loads an `EWMB` tensor file.
EwmStatus ewm_embedding_load(const char *path, EwmEmbedding **out_handle);

// Releases a tensor. Null is ignored.
void ewm_embedding_free(EwmEmbedding *e);

// Scene consistency in [0, 1] of a patch-per-frame tensor.
EwmStatus ewm_scene_score(const EwmEmbedding *e, double *out_score);

// Greedy diverse selection over a row-major `n`×`n` similarity matrix.
// Writes `k` indices in selection order to `out_indices`.
EwmStatus ewm_greedy_select(const double *matrix, size_t n, size_t k, size_t *out_indices);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EWMEVAL_H */
