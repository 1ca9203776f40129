#ifndef ADASAC_H
#define ADASAC_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AdasacStatus {
  ADASAC_STATUS_OK = 0,
  ADASAC_STATUS_NULL_POINTER = 1,
  ADASAC_STATUS_INVALID_ARGUMENT = 2,
  ADASAC_STATUS_INSUFFICIENT_DATA = 3,
  ADASAC_STATUS_PANIC = 4,
} AdasacStatus;

typedef enum AdasacTask {
  ADASAC_TASK_LINE = 0,
  ADASAC_TASK_HOMOGRAPHY = 1,
} AdasacTask;

typedef enum AdasacEngine {
  ADASAC_ENGINE_RANSAC = 0,
  ADASAC_ENGINE_GASAC = 1,
  ADASAC_ENGINE_ADAPTIVE = 2,
} AdasacEngine;

/**
 * Opaque dataset handle.
 */
typedef struct AdasacDataset AdasacDataset;

/**
 * Opaque result of one engine run.
 */
typedef struct AdasacResult AdasacResult;

/**
 * Genetic engine settings. GASAC only reads `population_size`.
 */
typedef struct AdasacParams {
  double gamma;
  double delta;
  size_t population_size;
  size_t elitism;
} AdasacParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *adasac_last_error(void);

/**
 * Defaults: gamma 3, delta 0.2, population 10, elitism 1.
 */
struct AdasacParams adasac_params_default(void);

/**
 * `norm_fitness ^ gamma`.
 */
double adasac_crossover_probability(double norm_fitness, double gamma);

/**
 * `exp(-norm_fitness / delta)`.
 */
double adasac_mutation_probability(double norm_fitness, double delta);

/**
 * Builds a point dataset from `n` interleaved `x, y` pairs.
 *
 * # Safety
 * `xy` must point to `2 * n` doubles and `out` must be writable.
 */
enum AdasacStatus adasac_dataset_from_points(const double *xy,
                                             size_t n,
                                             struct AdasacDataset **out);

/**
 * Builds a correspondence dataset from `n` rows of `x1, y1, x2, y2`.
 *
 * # Safety
 * `xyxy` must point to `4 * n` doubles and `out` must be writable.
 */
enum AdasacStatus adasac_dataset_from_correspondences(const double *xyxy,
                                                      size_t n,
                                                      struct AdasacDataset **out);

/**
 * Generates a labeled synthetic dataset.
 *
 * # Safety
 * `out` must be writable.
 */
enum AdasacStatus adasac_dataset_generate(enum AdasacTask task,
                                          size_t n,
                                          double inlier_ratio,
                                          double noise_sigma,
                                          double outlier_box,
                                          double inlier_threshold,
                                          uint64_t seed,
                                          struct AdasacDataset **out);

/**
 * Number of observations, or 0 for a null handle.
 *
 * # Safety
 * `dataset` must be null or a live handle.
 */
size_t adasac_dataset_len(const struct AdasacDataset *dataset);

/**
 * Copies up to `capacity` inlier labels (1 inlier, 0 outlier) into `labels`
 * and returns how many the dataset has; 0 for unlabeled data.
 *
 * # Safety
 * `dataset` must be a live handle; `labels` must hold `capacity` bytes or
 * be null when `capacity` is 0.
 */
size_t adasac_dataset_labels(const struct AdasacDataset *dataset, uint8_t *labels, size_t capacity);

/**
 * # Safety
 * `dataset` must be null or a handle not yet freed.
 */
void adasac_dataset_free(struct AdasacDataset *dataset);

/**
 * Runs one engine. Points use a line model, correspondences a homography.
 * `params` may be null for the defaults.
 *
 * # Safety
 * `dataset` must be a live handle, `params` null or readable, `out`
 * writable.
 */
enum AdasacStatus adasac_run(const struct AdasacDataset *dataset,
                             enum AdasacEngine engine,
                             double inlier_threshold,
                             const struct AdasacParams *params,
                             size_t budget,
                             uint64_t seed,
                             struct AdasacResult **out);

/**
 * # Safety
 * `result` must be null or a live handle.
 */
size_t adasac_result_models_generated(const struct AdasacResult *result);

/**
 * Inlier count of the best model over the whole dataset.
 *
 * # Safety
 * `result` must be null or a live handle.
 */
size_t adasac_result_best_inliers(const struct AdasacResult *result);

/**
 * Copies up to `capacity` best-so-far inlier counts (one per fitted model)
 * and returns the full length.
 *
 * # Safety
 * `result` must be a live handle; `out` must hold `capacity` elements or
 * be null.
 */
size_t adasac_result_curve(const struct AdasacResult *result, size_t *out, size_t capacity);

/**
 * Copies the dataset indices of the best minimal sample and returns their
 * count.
 *
 * # Safety
 * As [`adasac_result_curve`].
 */
size_t adasac_result_sample(const struct AdasacResult *result, size_t *out, size_t capacity);

/**
 * Copies the best model's parameters (`a, b, c` for a line, the row-major
 * 3x3 matrix for a homography) and returns their count; 0 when every
 * sample was degenerate.
 *
 * # Safety
 * As [`adasac_result_curve`].
 */
size_t adasac_result_model(const struct AdasacResult *result, double *out, size_t capacity);

/**
 * # Safety
 * `result` must be null or a handle not yet freed.
 */
void adasac_result_free(struct AdasacResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ADASAC_H */
