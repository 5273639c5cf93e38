// Copyright 2026 The occa Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// C interface to the occa one-class feature adaptation library.
//
// Objects are opaque handles created by the library and released with the
// matching *_free function. Every fallible call returns an occa_status; on
// failure occa_last_error() holds a message for the calling thread.

#ifndef OCCA_OCCA_H_
#define OCCA_OCCA_H_

#include <stddef.h>
#include <stdint.h>

#if defined(OCCA_BUILDING_LIBRARY)
#define OCCA_API __attribute__((visibility("default")))
#else
#define OCCA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum occa_status {
  OCCA_OK = 0,
  OCCA_ERR_CONFIG = 1,
  OCCA_ERR_IO = 2,
  OCCA_ERR_FORMAT = 3,
  OCCA_ERR_SHAPE_MISMATCH = 4,
  OCCA_ERR_DEGENERATE_VECTOR = 5,
  OCCA_ERR_K_TOO_LARGE = 6,
  OCCA_ERR_SINGLE_CLASS = 7,
  OCCA_ERR_CENTER_SAMPLING_FAILED = 8,
  OCCA_ERR_NUMERIC = 9,
  OCCA_ERR_INVALID_ARGUMENT = 10, /* null handle or output pointer */
  OCCA_ERR_INTERNAL = 11
} occa_status;

typedef enum occa_format { OCCA_FORMAT_BINARY = 0, OCCA_FORMAT_CSV = 1 } occa_format;

typedef enum occa_objective { OCCA_OBJECTIVE_CA2 = 0, OCCA_OBJECTIVE_CENTER = 1 } occa_objective;

typedef enum occa_architecture {
  OCCA_ARCH_LINEAR = 0,
  OCCA_ARCH_RESIDUAL_MLP = 1
} occa_architecture;

typedef enum occa_stop_reason {
  OCCA_STOP_PATIENCE = 0,
  OCCA_STOP_MAX_EPOCHS = 1
} occa_stop_reason;

typedef struct occa_features occa_features;
typedef struct occa_adapter occa_adapter;
typedef struct occa_plan occa_plan;
typedef struct occa_train_log occa_train_log;

OCCA_API const char* occa_version(void);
OCCA_API const char* occa_status_name(occa_status status);
/* Message of the last failed call on this thread; "" if none. */
OCCA_API const char* occa_last_error(void);
OCCA_API uint64_t occa_derive_seed(uint64_t base, uint64_t stream);

OCCA_API const char* occa_objective_name(occa_objective objective);
OCCA_API occa_status occa_objective_parse(const char* name, occa_objective* out);
OCCA_API const char* occa_architecture_name(occa_architecture arch);
OCCA_API occa_status occa_architecture_parse(const char* name, occa_architecture* out);

/* ---- features ---------------------------------------------------------- */

/* Copies `values` (rows x dim, row-major). `labels` may be NULL. */
OCCA_API occa_status occa_features_create(size_t rows, size_t dim, const float* values,
                                          const int32_t* labels, occa_features** out);
/* Reads OCCF binary or CSV, detected from the content. */
OCCA_API occa_status occa_features_load(const char* path, occa_features** out);
OCCA_API occa_status occa_features_save(const occa_features* features, const char* path,
                                        occa_format format);
OCCA_API size_t occa_features_rows(const occa_features* features);
OCCA_API size_t occa_features_dim(const occa_features* features);
OCCA_API const float* occa_features_data(const occa_features* features);
/* NULL when the matrix carries no labels. */
OCCA_API const int32_t* occa_features_labels(const occa_features* features);
OCCA_API void occa_features_free(occa_features* features);

/* ---- synthetic data ---------------------------------------------------- */

typedef struct occa_synthetic_spec {
  size_t dim;
  size_t inlier_classes;
  size_t per_class;
  size_t test_per_class;
  double noise_sigma;
  size_t outlier_classes;
  size_t per_outlier_class;
  double max_center_cosine;
  double noise_spread;
  double outlier_anchor_cosine;
  uint64_t seed;
} occa_synthetic_spec;

OCCA_API void occa_synthetic_spec_default(occa_synthetic_spec* spec);
/* Train rows carry class ids; test rows carry 0 (inlier) or 1 (outlier). */
OCCA_API occa_status occa_generate(const occa_synthetic_spec* spec, occa_features** train,
                                   occa_features** test);

/* ---- adapters ---------------------------------------------------------- */

OCCA_API occa_status occa_adapter_identity(occa_architecture arch, size_t dim, size_t hidden,
                                           uint64_t seed, occa_adapter** out);
OCCA_API occa_status occa_adapter_load(const char* path, occa_adapter** out);
OCCA_API occa_status occa_adapter_save(const occa_adapter* adapter, const char* path);
OCCA_API occa_status occa_adapter_clone(const occa_adapter* adapter, occa_adapter** out);
OCCA_API occa_architecture occa_adapter_arch(const occa_adapter* adapter);
OCCA_API size_t occa_adapter_dim(const occa_adapter* adapter);
OCCA_API size_t occa_adapter_hidden(const occa_adapter* adapter);
OCCA_API size_t occa_adapter_param_count(const occa_adapter* adapter);
OCCA_API const float* occa_adapter_values(const occa_adapter* adapter);
/* Maps every row through the adapter; labels are carried over. */
OCCA_API occa_status occa_adapter_apply(const occa_adapter* adapter, const occa_features* in,
                                        occa_features** out);
OCCA_API void occa_adapter_free(occa_adapter* adapter);

/* ---- neighbor plan ----------------------------------------------------- */

OCCA_API occa_status occa_plan_build(const occa_features* features, size_t k, double beta,
                                     occa_plan** out);
OCCA_API occa_status occa_plan_load(const char* path, occa_plan** out);
OCCA_API occa_status occa_plan_save(const occa_plan* plan, const char* path);
OCCA_API size_t occa_plan_rows(const occa_plan* plan);
OCCA_API size_t occa_plan_k(const occa_plan* plan);
OCCA_API double occa_plan_beta(const occa_plan* plan);
OCCA_API double occa_plan_tau(const occa_plan* plan);
OCCA_API double occa_plan_sigma(const occa_plan* plan);
/* rows x k neighbor ids, row-major. */
OCCA_API const uint32_t* occa_plan_neighbors(const occa_plan* plan);
OCCA_API void occa_plan_free(occa_plan* plan);

/* ---- training ---------------------------------------------------------- */

typedef struct occa_train_config {
  size_t k;
  size_t k_star;
  double beta;
  double lr;
  double momentum;
  double weight_decay;
  size_t batch_size;
  size_t patience;
  size_t max_epochs;
  uint64_t seed;
  occa_objective objective;
  occa_architecture arch;
  size_t hidden; /* 0: same as the feature dimension */
} occa_train_config;

OCCA_API void occa_train_config_default(occa_train_config* config);

/* Called after epoch 0 (identity) and after every completed epoch. The
 * adapter is only valid for the duration of the call. */
typedef void (*occa_epoch_callback)(void* user, size_t epoch, const occa_adapter* adapter);

/* `callback` and `log` may be NULL. The returned adapter is the one with the
 * lowest logged loss. */
OCCA_API occa_status occa_train(const occa_features* train, const occa_train_config* config,
                                occa_epoch_callback callback, void* user, occa_adapter** adapter,
                                occa_train_log** log);

/* Entries per series: epochs_run + 1, entry 0 being the identity adapter. */
OCCA_API size_t occa_train_log_size(const occa_train_log* log);
OCCA_API const double* occa_train_log_loss(const occa_train_log* log);
OCCA_API const double* occa_train_log_active_fraction(const occa_train_log* log);
OCCA_API size_t occa_train_log_epochs_run(const occa_train_log* log);
OCCA_API size_t occa_train_log_best_epoch(const occa_train_log* log);
OCCA_API occa_stop_reason occa_train_log_stop_reason(const occa_train_log* log);
OCCA_API double occa_train_log_tau(const occa_train_log* log);
OCCA_API double occa_train_log_sigma(const occa_train_log* log);
OCCA_API void occa_train_log_free(occa_train_log* log);

/* ---- scoring and evaluation -------------------------------------------- */

/* Mean squared distance from each test row to its k_star nearest train
 * rows. `scores` must hold occa_features_rows(test) values. */
OCCA_API occa_status occa_score(const occa_features* train, const occa_features* test,
                                size_t k_star, int normalize, double* scores);
/* Writes `id,score` CSV or a two-column OCCF (row id, score). `labels` may
 * be NULL. */
OCCA_API occa_status occa_scores_save(const double* scores, size_t n, const int32_t* labels,
                                      const char* path, occa_format format);

typedef struct occa_eval_report {
  double auroc;
  double tpr95fpr;
  size_t n_inliers;
  size_t n_outliers;
  double threshold;
} occa_eval_report;

/* Labels: 0 one-class sample, 1 outlier; larger scores mean more outlying. */
OCCA_API occa_status occa_auroc(const double* scores, const int32_t* labels, size_t n,
                                double* out);
OCCA_API occa_status occa_fpr_at_95tpr(const double* scores, const int32_t* labels, size_t n,
                                       double* fpr, double* threshold);
OCCA_API occa_status occa_evaluate(const double* scores, const int32_t* labels, size_t n,
                                   occa_eval_report* out);
OCCA_API const char* occa_eval_csv_header(void);
/* snprintf-style: writes at most `capacity` bytes including the terminator
 * and returns the full length. `pretty` selects the text block over CSV. */
OCCA_API size_t occa_eval_report_format(const occa_eval_report* report, int pretty, char* buffer,
                                        size_t capacity);

typedef struct occa_probe_config {
  double holdout_fraction;
  double lr;
  size_t epochs;
  uint64_t seed;
} occa_probe_config;

OCCA_API void occa_probe_config_default(occa_probe_config* config);
/* Held-out accuracy of a softmax probe trained on the class labels. */
OCCA_API occa_status occa_linear_probe(const occa_features* features,
                                       const occa_probe_config* config, double* accuracy);

#ifdef __cplusplus
}
#endif

#endif  // OCCA_OCCA_H_
