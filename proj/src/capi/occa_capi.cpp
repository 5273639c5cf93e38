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


#include "occa/occa.h"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <exception>
#include <new>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "occa/adaptation.hpp"
#include "occa/binary_io.hpp"
#include "occa/error.hpp"
#include "occa/evaluation.hpp"
#include "occa/features.hpp"
#include "occa/neighborhood.hpp"
#include "occa/scoring.hpp"

struct occa_features {
  occa::FeatureMatrix fm;
};

struct occa_adapter {
  occa::AdapterParams params;
};

struct occa_plan {
  occa::NeighborPlan plan;
};

struct occa_train_log {
  occa::TrainLog log;
};

namespace {

thread_local std::string g_last_error;

occa_status to_status(occa::ErrorCode code) {
  switch (code) {
    case occa::ErrorCode::kConfig: return OCCA_ERR_CONFIG;
    case occa::ErrorCode::kIo: return OCCA_ERR_IO;
    case occa::ErrorCode::kFormat: return OCCA_ERR_FORMAT;
    case occa::ErrorCode::kShapeMismatch: return OCCA_ERR_SHAPE_MISMATCH;
    case occa::ErrorCode::kDegenerateVector: return OCCA_ERR_DEGENERATE_VECTOR;
    case occa::ErrorCode::kKTooLarge: return OCCA_ERR_K_TOO_LARGE;
    case occa::ErrorCode::kSingleClass: return OCCA_ERR_SINGLE_CLASS;
    case occa::ErrorCode::kCenterSamplingFailed: return OCCA_ERR_CENTER_SAMPLING_FAILED;
    case occa::ErrorCode::kNumeric: return OCCA_ERR_NUMERIC;
  }
  return OCCA_ERR_INTERNAL;
}

occa_status set_error(occa_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
occa_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return OCCA_OK;
  } catch (const occa::Error& e) {
    return set_error(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(OCCA_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(OCCA_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(OCCA_ERR_INTERNAL, "unknown exception");
  }
}

#define OCCA_REQUIRE(cond)                                                   \
  do {                                                                       \
    if (!(cond)) return set_error(OCCA_ERR_INVALID_ARGUMENT, #cond " is null"); \
  } while (0)

occa::FileFormat to_format(occa_format f) {
  if (f == OCCA_FORMAT_BINARY) return occa::FileFormat::kBinary;
  if (f == OCCA_FORMAT_CSV) return occa::FileFormat::kCsv;
  occa::fail(occa::ErrorCode::kConfig, "unknown file format");
}

occa::TrainConfig to_core(const occa_train_config& c) {
  occa::TrainConfig cfg;
  cfg.k = c.k;
  cfg.k_star = c.k_star;
  cfg.beta = c.beta;
  cfg.lr = c.lr;
  cfg.momentum = c.momentum;
  cfg.weight_decay = c.weight_decay;
  cfg.batch_size = c.batch_size;
  cfg.patience = c.patience;
  cfg.max_epochs = c.max_epochs;
  cfg.seed = c.seed;
  cfg.objective = static_cast<occa::Objective>(c.objective);
  cfg.arch = static_cast<occa::Architecture>(c.arch);
  cfg.hidden = c.hidden;
  if (c.objective != OCCA_OBJECTIVE_CA2 && c.objective != OCCA_OBJECTIVE_CENTER)
    occa::fail(occa::ErrorCode::kConfig, "unknown objective");
  if (c.arch != OCCA_ARCH_LINEAR && c.arch != OCCA_ARCH_RESIDUAL_MLP)
    occa::fail(occa::ErrorCode::kConfig, "unknown architecture");
  return cfg;
}

occa::SyntheticSpec to_core(const occa_synthetic_spec& s) {
  occa::SyntheticSpec spec;
  spec.dim = s.dim;
  spec.inlier_classes = s.inlier_classes;
  spec.per_class = s.per_class;
  spec.test_per_class = s.test_per_class;
  spec.noise_sigma = s.noise_sigma;
  spec.outlier_classes = s.outlier_classes;
  spec.per_outlier_class = s.per_outlier_class;
  spec.max_center_cosine = s.max_center_cosine;
  spec.noise_spread = s.noise_spread;
  spec.outlier_anchor_cosine = s.outlier_anchor_cosine;
  spec.seed = s.seed;
  return spec;
}

std::vector<std::int32_t> copy_labels(const std::int32_t* labels, std::size_t n) {
  return {labels, labels + n};
}

}  // namespace

extern "C" {

const char* occa_version(void) { return "0.1.0"; }

const char* occa_status_name(occa_status status) {
  switch (status) {
    case OCCA_OK: return "ok";
    case OCCA_ERR_CONFIG: return "config";
    case OCCA_ERR_IO: return "io";
    case OCCA_ERR_FORMAT: return "format";
    case OCCA_ERR_SHAPE_MISMATCH: return "shape-mismatch";
    case OCCA_ERR_DEGENERATE_VECTOR: return "degenerate-vector";
    case OCCA_ERR_K_TOO_LARGE: return "k-too-large";
    case OCCA_ERR_SINGLE_CLASS: return "single-class";
    case OCCA_ERR_CENTER_SAMPLING_FAILED: return "center-sampling-failed";
    case OCCA_ERR_NUMERIC: return "numeric";
    case OCCA_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case OCCA_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* occa_last_error(void) { return g_last_error.c_str(); }

uint64_t occa_derive_seed(uint64_t base, uint64_t stream) {
  return occa::derive_seed(base, stream);
}

const char* occa_objective_name(occa_objective objective) {
  return occa::objective_name(static_cast<occa::Objective>(objective));
}

occa_status occa_objective_parse(const char* name, occa_objective* out) {
  OCCA_REQUIRE(name);
  OCCA_REQUIRE(out);
  return guarded([&] { *out = static_cast<occa_objective>(occa::parse_objective(name)); });
}

const char* occa_architecture_name(occa_architecture arch) {
  return occa::architecture_name(static_cast<occa::Architecture>(arch));
}

occa_status occa_architecture_parse(const char* name, occa_architecture* out) {
  OCCA_REQUIRE(name);
  OCCA_REQUIRE(out);
  return guarded([&] { *out = static_cast<occa_architecture>(occa::parse_architecture(name)); });
}

// ---- features

occa_status occa_features_create(size_t rows, size_t dim, const float* values,
                                 const int32_t* labels, occa_features** out) {
  OCCA_REQUIRE(values);
  OCCA_REQUIRE(out);
  return guarded([&] {
    occa::FeatureMatrix fm{occa::Matrix(rows, dim, std::vector<float>(values, values + rows * dim)),
                           std::nullopt};
    if (labels) fm.labels = copy_labels(labels, rows);
    occa::validate(fm);
    *out = new occa_features{std::move(fm)};
  });
}

occa_status occa_features_load(const char* path, occa_features** out) {
  OCCA_REQUIRE(path);
  OCCA_REQUIRE(out);
  return guarded([&] { *out = new occa_features{occa::load_features(path)}; });
}

occa_status occa_features_save(const occa_features* features, const char* path,
                               occa_format format) {
  OCCA_REQUIRE(features);
  OCCA_REQUIRE(path);
  return guarded([&] { occa::save_features(features->fm, path, to_format(format)); });
}

size_t occa_features_rows(const occa_features* features) {
  return features ? features->fm.rows() : 0;
}

size_t occa_features_dim(const occa_features* features) {
  return features ? features->fm.dim() : 0;
}

const float* occa_features_data(const occa_features* features) {
  return features ? features->fm.data.values().data() : nullptr;
}

const int32_t* occa_features_labels(const occa_features* features) {
  if (!features || !features->fm.labels) return nullptr;
  return features->fm.labels->data();
}

void occa_features_free(occa_features* features) { delete features; }

// ---- synthetic

void occa_synthetic_spec_default(occa_synthetic_spec* spec) {
  if (!spec) return;
  const occa::SyntheticSpec d;
  *spec = occa_synthetic_spec{d.dim,
                              d.inlier_classes,
                              d.per_class,
                              d.test_per_class,
                              d.noise_sigma,
                              d.outlier_classes,
                              d.per_outlier_class,
                              d.max_center_cosine,
                              d.noise_spread,
                              d.outlier_anchor_cosine,
                              d.seed};
}

occa_status occa_generate(const occa_synthetic_spec* spec, occa_features** train,
                          occa_features** test) {
  OCCA_REQUIRE(spec);
  OCCA_REQUIRE(train);
  OCCA_REQUIRE(test);
  return guarded([&] {
    auto [tr, te] = occa::gen_synthetic(to_core(*spec));
    auto* a = new occa_features{std::move(tr)};
    try {
      *test = new occa_features{std::move(te)};
    } catch (...) {
      delete a;
      throw;
    }
    *train = a;
  });
}

// ---- adapters

occa_status occa_adapter_identity(occa_architecture arch, size_t dim, size_t hidden,
                                  uint64_t seed, occa_adapter** out) {
  OCCA_REQUIRE(out);
  return guarded([&] {
    if (arch != OCCA_ARCH_LINEAR && arch != OCCA_ARCH_RESIDUAL_MLP)
      occa::fail(occa::ErrorCode::kConfig, "unknown architecture");
    *out = new occa_adapter{
        occa::AdapterParams::identity(static_cast<occa::Architecture>(arch), dim, hidden, seed)};
  });
}

occa_status occa_adapter_load(const char* path, occa_adapter** out) {
  OCCA_REQUIRE(path);
  OCCA_REQUIRE(out);
  return guarded([&] { *out = new occa_adapter{occa::load_adapter(path)}; });
}

occa_status occa_adapter_save(const occa_adapter* adapter, const char* path) {
  OCCA_REQUIRE(adapter);
  OCCA_REQUIRE(path);
  return guarded([&] { occa::save_adapter(adapter->params, path); });
}

occa_status occa_adapter_clone(const occa_adapter* adapter, occa_adapter** out) {
  OCCA_REQUIRE(adapter);
  OCCA_REQUIRE(out);
  return guarded([&] { *out = new occa_adapter{adapter->params}; });
}

occa_architecture occa_adapter_arch(const occa_adapter* adapter) {
  return adapter ? static_cast<occa_architecture>(adapter->params.arch()) : OCCA_ARCH_LINEAR;
}

size_t occa_adapter_dim(const occa_adapter* adapter) {
  return adapter ? adapter->params.dim() : 0;
}

size_t occa_adapter_hidden(const occa_adapter* adapter) {
  return adapter ? adapter->params.hidden() : 0;
}

size_t occa_adapter_param_count(const occa_adapter* adapter) {
  return adapter ? adapter->params.values().size() : 0;
}

const float* occa_adapter_values(const occa_adapter* adapter) {
  return adapter ? adapter->params.values().data() : nullptr;
}

occa_status occa_adapter_apply(const occa_adapter* adapter, const occa_features* in,
                               occa_features** out) {
  OCCA_REQUIRE(adapter);
  OCCA_REQUIRE(in);
  OCCA_REQUIRE(out);
  return guarded([&] {
    occa::FeatureMatrix fm{occa::adapt_features(adapter->params, in->fm.data), in->fm.labels};
    *out = new occa_features{std::move(fm)};
  });
}

void occa_adapter_free(occa_adapter* adapter) { delete adapter; }

// ---- neighbor plan

occa_status occa_plan_build(const occa_features* features, size_t k, double beta,
                            occa_plan** out) {
  OCCA_REQUIRE(features);
  OCCA_REQUIRE(out);
  return guarded([&] { *out = new occa_plan{occa::build_plan(features->fm.data, k, beta)}; });
}

occa_status occa_plan_load(const char* path, occa_plan** out) {
  OCCA_REQUIRE(path);
  OCCA_REQUIRE(out);
  return guarded([&] { *out = new occa_plan{occa::load_plan(path)}; });
}

occa_status occa_plan_save(const occa_plan* plan, const char* path) {
  OCCA_REQUIRE(plan);
  OCCA_REQUIRE(path);
  return guarded([&] { occa::save_plan(plan->plan, path); });
}

size_t occa_plan_rows(const occa_plan* plan) { return plan ? plan->plan.rows() : 0; }
size_t occa_plan_k(const occa_plan* plan) { return plan ? plan->plan.k : 0; }
double occa_plan_beta(const occa_plan* plan) { return plan ? plan->plan.beta : 0.0; }
double occa_plan_tau(const occa_plan* plan) { return plan ? plan->plan.tau : 0.0; }
double occa_plan_sigma(const occa_plan* plan) { return plan ? plan->plan.sigma : 0.0; }

const uint32_t* occa_plan_neighbors(const occa_plan* plan) {
  return plan ? plan->plan.neighbor_ids.data() : nullptr;
}

void occa_plan_free(occa_plan* plan) { delete plan; }

// ---- training

void occa_train_config_default(occa_train_config* config) {
  if (!config) return;
  const occa::TrainConfig d;
  *config = occa_train_config{d.k,
                              d.k_star,
                              d.beta,
                              d.lr,
                              d.momentum,
                              d.weight_decay,
                              d.batch_size,
                              d.patience,
                              d.max_epochs,
                              d.seed,
                              static_cast<occa_objective>(d.objective),
                              static_cast<occa_architecture>(d.arch),
                              d.hidden};
}

occa_status occa_train(const occa_features* train, const occa_train_config* config,
                       occa_epoch_callback callback, void* user, occa_adapter** adapter,
                       occa_train_log** log) {
  OCCA_REQUIRE(train);
  OCCA_REQUIRE(config);
  OCCA_REQUIRE(adapter);
  return guarded([&] {
    occa::EpochObserver observer;
    if (callback) {
      observer = [callback, user](occa::Index epoch, const occa::AdapterParams& params) {
        // The callback sees a temporary handle; copying keeps the training
        // state private.
        const occa_adapter view{params};
        callback(user, epoch, &view);
      };
    }
    auto result = occa::train(train->fm.data, to_core(*config), observer);
    auto* a = new occa_adapter{std::move(result.params)};
    if (log) {
      try {
        *log = new occa_train_log{std::move(result.log)};
      } catch (...) {
        delete a;
        throw;
      }
    }
    *adapter = a;
  });
}

size_t occa_train_log_size(const occa_train_log* log) { return log ? log->log.loss.size() : 0; }

const double* occa_train_log_loss(const occa_train_log* log) {
  return log ? log->log.loss.data() : nullptr;
}

const double* occa_train_log_active_fraction(const occa_train_log* log) {
  return log ? log->log.active_fraction.data() : nullptr;
}

size_t occa_train_log_epochs_run(const occa_train_log* log) {
  return log ? log->log.epochs_run : 0;
}

size_t occa_train_log_best_epoch(const occa_train_log* log) {
  return log ? log->log.best_epoch : 0;
}

occa_stop_reason occa_train_log_stop_reason(const occa_train_log* log) {
  return log ? static_cast<occa_stop_reason>(log->log.stop_reason) : OCCA_STOP_MAX_EPOCHS;
}

double occa_train_log_tau(const occa_train_log* log) { return log ? log->log.tau : 0.0; }
double occa_train_log_sigma(const occa_train_log* log) { return log ? log->log.sigma : 0.0; }

void occa_train_log_free(occa_train_log* log) { delete log; }

// ---- scoring and evaluation

occa_status occa_score(const occa_features* train, const occa_features* test, size_t k_star,
                       int normalize, double* scores) {
  OCCA_REQUIRE(train);
  OCCA_REQUIRE(test);
  OCCA_REQUIRE(scores);
  return guarded([&] {
    const auto result = occa::occ_score(train->fm.data, test->fm.data, k_star, normalize != 0);
    std::copy(result.scores.begin(), result.scores.end(), scores);
  });
}

occa_status occa_scores_save(const double* scores, size_t n, const int32_t* labels,
                             const char* path, occa_format format) {
  OCCA_REQUIRE(scores);
  OCCA_REQUIRE(path);
  return guarded([&] {
    if (format != OCCA_FORMAT_CSV && format != OCCA_FORMAT_BINARY)
      occa::fail(occa::ErrorCode::kConfig, "unknown file format");
    occa::ScoreResult result{std::vector<double>(scores, scores + n), 0};
    std::optional<std::vector<std::int32_t>> lab;
    if (labels) lab = copy_labels(labels, n);
    const std::string bytes = format == OCCA_FORMAT_CSV
                                  ? occa::scores_to_csv(result)
                                  : occa::scores_to_occf(result, lab ? &*lab : nullptr);
    occa::detail::write_file_atomic(path, bytes);
  });
}

occa_status occa_auroc(const double* scores, const int32_t* labels, size_t n, double* out) {
  OCCA_REQUIRE(scores);
  OCCA_REQUIRE(labels);
  OCCA_REQUIRE(out);
  return guarded([&] { *out = occa::auroc({scores, n}, {labels, n}); });
}

occa_status occa_fpr_at_95tpr(const double* scores, const int32_t* labels, size_t n,
                              double* fpr, double* threshold) {
  OCCA_REQUIRE(scores);
  OCCA_REQUIRE(labels);
  OCCA_REQUIRE(fpr);
  return guarded([&] {
    const auto r = occa::fpr_at_95tpr({scores, n}, {labels, n});
    *fpr = r.fpr;
    if (threshold) *threshold = r.threshold;
  });
}

occa_status occa_evaluate(const double* scores, const int32_t* labels, size_t n,
                          occa_eval_report* out) {
  OCCA_REQUIRE(scores);
  OCCA_REQUIRE(out);
  return guarded([&] {
    if (!labels) occa::fail(occa::ErrorCode::kSingleClass, "test labels are required");
    const auto r = occa::evaluate({scores, n}, {labels, n});
    *out = occa_eval_report{r.auroc, r.tpr95fpr, r.n_inliers, r.n_outliers, r.threshold};
  });
}

const char* occa_eval_csv_header(void) { return occa::kEvalCsvHeader; }

size_t occa_eval_report_format(const occa_eval_report* report, int pretty, char* buffer,
                               size_t capacity) {
  if (!report) return 0;
  const occa::EvalReport r{report->auroc, report->tpr95fpr, report->n_inliers,
                           report->n_outliers, report->threshold};
  const std::string s = pretty ? occa::report_text(r) : occa::report_csv_record(r);
  if (buffer && capacity > 0) {
    const std::size_t n = std::min(s.size(), capacity - 1);
    std::memcpy(buffer, s.data(), n);
    buffer[n] = '\0';
  }
  return s.size();
}

void occa_probe_config_default(occa_probe_config* config) {
  if (!config) return;
  const occa::ProbeConfig d;
  *config = occa_probe_config{d.holdout_fraction, d.lr, d.epochs, d.seed};
}

occa_status occa_linear_probe(const occa_features* features, const occa_probe_config* config,
                              double* accuracy) {
  OCCA_REQUIRE(features);
  OCCA_REQUIRE(config);
  OCCA_REQUIRE(accuracy);
  return guarded([&] {
    const occa::ProbeConfig cfg{config->holdout_fraction, config->lr, config->epochs,
                                config->seed};
    *accuracy = occa::linear_probe(features->fm, cfg);
  });
}

}  // extern "C"
