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

#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "occa/occa.h"
#include "support/temp_dir.hpp"

using occa::testing::TempDir;

namespace {

struct Generated {
  occa_features* train = nullptr;
  occa_features* test = nullptr;
  ~Generated() {
    occa_features_free(train);
    occa_features_free(test);
  }
};

void generate(Generated& g, size_t classes, uint64_t seed) {
  occa_synthetic_spec spec;
  occa_synthetic_spec_default(&spec);
  spec.dim = 8;
  spec.inlier_classes = classes;
  spec.per_class = 20;
  spec.test_per_class = 10;
  spec.per_outlier_class = 10;
  spec.seed = seed;
  REQUIRE(occa_generate(&spec, &g.train, &g.test) == OCCA_OK);
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(occa_version()) == "0.1.0");
  CHECK(std::string(occa_status_name(OCCA_OK)) == "ok");
  CHECK(std::string(occa_status_name(OCCA_ERR_SINGLE_CLASS)) == "single-class");
  CHECK(std::string(occa_status_name(static_cast<occa_status>(99))) == "unknown");
}

TEST_CASE("features through the C API") {
  TempDir dir("capi");
  const float values[] = {1.5f, -2.0f, 3.0f, 4.0f};
  const int32_t labels[] = {0, 1};
  occa_features* fm = nullptr;
  REQUIRE(occa_features_create(2, 2, values, labels, &fm) == OCCA_OK);
  CHECK(occa_features_rows(fm) == 2);
  CHECK(occa_features_dim(fm) == 2);
  CHECK(std::memcmp(occa_features_data(fm), values, sizeof values) == 0);
  CHECK(occa_features_labels(fm)[1] == 1);
  const auto path = (dir / "f.occf").string();
  REQUIRE(occa_features_save(fm, path.c_str(), OCCA_FORMAT_BINARY) == OCCA_OK);
  occa_features* back = nullptr;
  REQUIRE(occa_features_load(path.c_str(), &back) == OCCA_OK);
  CHECK(std::memcmp(occa_features_data(back), values, sizeof values) == 0);
  CHECK(occa_features_labels(back)[0] == 0);
  occa_features_free(back);
  occa_features_free(fm);

  REQUIRE(occa_features_create(2, 2, values, nullptr, &fm) == OCCA_OK);
  CHECK(occa_features_labels(fm) == nullptr);
  occa_features_free(fm);
  occa_features_free(nullptr);
}

TEST_CASE("errors map to status codes with a message") {
  occa_features* fm = nullptr;
  CHECK(occa_features_load("/nonexistent/x.occf", &fm) == OCCA_ERR_IO);
  CHECK(std::string(occa_last_error()).find("x.occf") != std::string::npos);
  CHECK(fm == nullptr);
  CHECK(occa_features_load(nullptr, &fm) == OCCA_ERR_INVALID_ARGUMENT);
  const float one[] = {1.0f};
  CHECK(occa_features_create(1, 1, one, nullptr, &fm) == OCCA_ERR_FORMAT);

  occa_synthetic_spec spec;
  occa_synthetic_spec_default(&spec);
  spec.dim = 2;
  spec.inlier_classes = 2;
  spec.outlier_classes = 2;
  spec.max_center_cosine = -0.2;
  occa_features *a = nullptr, *b = nullptr;
  CHECK(occa_generate(&spec, &a, &b) == OCCA_ERR_CENTER_SAMPLING_FAILED);
  spec.inlier_classes = 0;
  CHECK(occa_generate(&spec, &a, &b) == OCCA_ERR_CONFIG);

  occa_synthetic_spec_default(&spec);
  REQUIRE(occa_generate(&spec, &a, &b) == OCCA_OK);
  CHECK(std::string(occa_last_error()).empty());
  std::vector<double> scores(occa_features_rows(b));
  CHECK(occa_score(a, b, 100000, 0, scores.data()) == OCCA_ERR_K_TOO_LARGE);
  const int32_t* train_labels = occa_features_labels(a);
  std::vector<int32_t> zeros(occa_features_rows(a), 0);
  std::vector<double> s(occa_features_rows(a), 1.0);
  occa_eval_report report;
  CHECK(occa_evaluate(s.data(), zeros.data(), s.size(), &report) == OCCA_ERR_SINGLE_CLASS);
  CHECK(occa_evaluate(s.data(), nullptr, s.size(), &report) == OCCA_ERR_SINGLE_CLASS);
  CHECK(train_labels != nullptr);
  occa_features_free(a);
  occa_features_free(b);
}

TEST_CASE("last error is per thread") {
  occa_features* fm = nullptr;
  CHECK(occa_features_load("/nonexistent/main.occf", &fm) == OCCA_ERR_IO);
  std::string other;
  std::thread t([&] {
    other = occa_last_error();
    occa_features* x = nullptr;
    occa_features_load("/nonexistent/thread.occf", &x);
  });
  t.join();
  CHECK(other.empty());
  CHECK(std::string(occa_last_error()).find("main.occf") != std::string::npos);
}

TEST_CASE("identity adapter leaves features bit-identical") {
  Generated g;
  generate(g, 3, 1);
  for (auto arch : {OCCA_ARCH_LINEAR, OCCA_ARCH_RESIDUAL_MLP}) {
    occa_adapter* adapter = nullptr;
    REQUIRE(occa_adapter_identity(arch, 8, 0, 5, &adapter) == OCCA_OK);
    occa_features* out = nullptr;
    REQUIRE(occa_adapter_apply(adapter, g.test, &out) == OCCA_OK);
    CHECK(std::memcmp(occa_features_data(out), occa_features_data(g.test),
                      sizeof(float) * 8 * occa_features_rows(g.test)) == 0);
    CHECK(std::memcmp(occa_features_labels(out), occa_features_labels(g.test),
                      sizeof(int32_t) * occa_features_rows(g.test)) == 0);
    occa_features_free(out);
    occa_adapter_free(adapter);
  }
  occa_adapter* wrong = nullptr;
  REQUIRE(occa_adapter_identity(OCCA_ARCH_LINEAR, 3, 0, 0, &wrong) == OCCA_OK);
  occa_features* out = nullptr;
  CHECK(occa_adapter_apply(wrong, g.test, &out) == OCCA_ERR_SHAPE_MISMATCH);
  occa_adapter_free(wrong);
}

namespace {

struct EpochCounter {
  std::vector<size_t> epochs;
  size_t params = 0;
};

void count_epoch(void* user, size_t epoch, const occa_adapter* adapter) {
  auto* c = static_cast<EpochCounter*>(user);
  c->epochs.push_back(epoch);
  c->params = occa_adapter_param_count(adapter);
}

}  // namespace

TEST_CASE("training, callback, log and adapter files") {
  TempDir dir("capi");
  Generated g;
  generate(g, 2, 2);
  occa_train_config cfg;
  occa_train_config_default(&cfg);
  CHECK(cfg.k == 5);
  CHECK(cfg.k_star == 2);
  CHECK(cfg.beta == 0.3);
  CHECK(cfg.lr == 3e-4);
  CHECK(cfg.momentum == 0.9);
  CHECK(cfg.weight_decay == 1e-3);
  CHECK(cfg.batch_size == 512);
  CHECK(cfg.objective == OCCA_OBJECTIVE_CA2);
  cfg.lr = 0.05;
  cfg.max_epochs = 4;
  cfg.patience = 100;

  EpochCounter counter;
  occa_adapter* adapter = nullptr;
  occa_train_log* log = nullptr;
  REQUIRE(occa_train(g.train, &cfg, count_epoch, &counter, &adapter, &log) == OCCA_OK);
  CHECK(counter.epochs == std::vector<size_t>{0, 1, 2, 3, 4});
  CHECK(counter.params == 8 * 8 * 2 + 8);
  CHECK(occa_train_log_size(log) == 5);
  CHECK(occa_train_log_epochs_run(log) == 4);
  CHECK(occa_train_log_stop_reason(log) == OCCA_STOP_MAX_EPOCHS);
  CHECK(occa_train_log_best_epoch(log) <= 4);
  CHECK(occa_train_log_sigma(log) >= occa_train_log_tau(log));
  CHECK(occa_train_log_active_fraction(log)[0] >= 0.0);
  CHECK(occa_train_log_loss(log)[occa_train_log_best_epoch(log)] <= occa_train_log_loss(log)[0]);

  const auto path = (dir / "a.ocad").string();
  REQUIRE(occa_adapter_save(adapter, path.c_str()) == OCCA_OK);
  occa_adapter* back = nullptr;
  REQUIRE(occa_adapter_load(path.c_str(), &back) == OCCA_OK);
  CHECK(occa_adapter_arch(back) == OCCA_ARCH_RESIDUAL_MLP);
  CHECK(occa_adapter_dim(back) == 8);
  CHECK(occa_adapter_hidden(back) == 8);
  REQUIRE(occa_adapter_param_count(back) == occa_adapter_param_count(adapter));
  CHECK(std::memcmp(occa_adapter_values(back), occa_adapter_values(adapter),
                    sizeof(float) * occa_adapter_param_count(back)) == 0);
  occa_adapter* copy = nullptr;
  REQUIRE(occa_adapter_clone(back, &copy) == OCCA_OK);
  CHECK(occa_adapter_param_count(copy) == occa_adapter_param_count(back));
  occa_adapter_free(copy);
  occa_adapter_free(back);
  occa_adapter_free(adapter);
  occa_train_log_free(log);

  cfg.objective = static_cast<occa_objective>(9);
  CHECK(occa_train(g.train, &cfg, nullptr, nullptr, &adapter, nullptr) == OCCA_ERR_CONFIG);
}

TEST_CASE("plans through the C API") {
  TempDir dir("capi");
  Generated g;
  generate(g, 2, 3);
  occa_plan* plan = nullptr;
  REQUIRE(occa_plan_build(g.train, 5, 0.3, &plan) == OCCA_OK);
  CHECK(occa_plan_rows(plan) == 40);
  CHECK(occa_plan_k(plan) == 5);
  CHECK(occa_plan_beta(plan) == 0.3);
  const double tau = occa_plan_tau(plan);
  CHECK(occa_plan_sigma(plan) == tau + 0.3 * (1 - tau));
  for (size_t i = 0; i < 40; ++i)
    for (size_t j = 0; j < 5; ++j) CHECK(occa_plan_neighbors(plan)[i * 5 + j] != i);
  const auto path = (dir / "p.ocnp").string();
  REQUIRE(occa_plan_save(plan, path.c_str()) == OCCA_OK);
  occa_plan* back = nullptr;
  REQUIRE(occa_plan_load(path.c_str(), &back) == OCCA_OK);
  CHECK(occa_plan_tau(back) == tau);
  CHECK(std::memcmp(occa_plan_neighbors(back), occa_plan_neighbors(plan), 40 * 5 * 4) == 0);
  occa_plan_free(back);
  occa_plan_free(plan);
  CHECK(occa_plan_build(g.train, 40, 0.3, &plan) == OCCA_ERR_K_TOO_LARGE);
}

TEST_CASE("scoring and metrics through the C API") {
  TempDir dir("capi");
  Generated g;
  generate(g, 1, 4);
  std::vector<double> scores(occa_features_rows(g.test));
  REQUIRE(occa_score(g.train, g.test, 2, 0, scores.data()) == OCCA_OK);
  const int32_t* labels = occa_features_labels(g.test);
  double auc = 0.0, fpr = 0.0, threshold = 0.0;
  REQUIRE(occa_auroc(scores.data(), labels, scores.size(), &auc) == OCCA_OK);
  REQUIRE(occa_fpr_at_95tpr(scores.data(), labels, scores.size(), &fpr, &threshold) == OCCA_OK);
  occa_eval_report report;
  REQUIRE(occa_evaluate(scores.data(), labels, scores.size(), &report) == OCCA_OK);
  CHECK(report.auroc == auc);
  CHECK(report.tpr95fpr == fpr);
  CHECK(report.threshold == threshold);
  CHECK(report.n_inliers == 10);
  CHECK(report.n_outliers == 40);

  const double tie_scores[] = {1, 1, 2};
  const int32_t tie_labels[] = {0, 1, 1};
  REQUIRE(occa_auroc(tie_scores, tie_labels, 3, &auc) == OCCA_OK);
  CHECK(auc == 0.75);

  const size_t need = occa_eval_report_format(&report, 0, nullptr, 0);
  std::string full(need + 1, '\0');
  CHECK(occa_eval_report_format(&report, 0, full.data(), full.size()) == need);
  char small[5];
  occa_eval_report_format(&report, 0, small, sizeof small);
  CHECK(std::string(small) == full.substr(0, 4));
  CHECK(std::string(occa_eval_csv_header()) == "auroc,tpr95fpr,n_inliers,n_outliers,threshold");

  const auto csv = (dir / "s.csv").string();
  REQUIRE(occa_scores_save(scores.data(), scores.size(), labels, csv.c_str(), OCCA_FORMAT_CSV) ==
          OCCA_OK);
  const auto bin = (dir / "s.occf").string();
  REQUIRE(occa_scores_save(scores.data(), scores.size(), labels, bin.c_str(), OCCA_FORMAT_BINARY) ==
          OCCA_OK);
  occa_features* back = nullptr;
  REQUIRE(occa_features_load(bin.c_str(), &back) == OCCA_OK);
  CHECK(occa_features_dim(back) == 2);
  CHECK(occa_features_rows(back) == scores.size());
  occa_features_free(back);
}

TEST_CASE("linear probe through the C API") {
  Generated g;
  generate(g, 3, 5);
  occa_probe_config cfg;
  occa_probe_config_default(&cfg);
  CHECK(cfg.holdout_fraction == 0.3);
  double acc = 0.0;
  REQUIRE(occa_linear_probe(g.train, &cfg, &acc) == OCCA_OK);
  CHECK(acc == 1.0);
  CHECK(occa_linear_probe(g.test, nullptr, &acc) == OCCA_ERR_INVALID_ARGUMENT);
}

TEST_CASE("name parsing") {
  occa_objective o;
  CHECK(occa_objective_parse("center", &o) == OCCA_OK);
  CHECK(o == OCCA_OBJECTIVE_CENTER);
  CHECK(occa_objective_parse("nope", &o) == OCCA_ERR_CONFIG);
  occa_architecture a;
  CHECK(occa_architecture_parse("linear", &a) == OCCA_OK);
  CHECK(a == OCCA_ARCH_LINEAR);
  CHECK(std::string(occa_architecture_name(OCCA_ARCH_RESIDUAL_MLP)) == "residual-mlp");
  CHECK(occa_derive_seed(0, 0) == 0xe220a8397b1dcdafULL);
}
