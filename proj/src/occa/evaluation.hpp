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

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "occa/features.hpp"

namespace occa {

/// Probability that a random outlier (label 1) outscores a random inlier
/// (label 0), ties counting one half. Throws kSingleClass unless both labels
/// occur, and kConfig on other label values.
double auroc(std::span<const double> scores, std::span<const std::int32_t> labels);

struct FprAt95Tpr {
  double fpr = 0.0;
  /// Acceptance threshold: a sample is accepted as one-class when score <= it.
  double threshold = 0.0;
};

/// Threshold is the smallest score that accepts at least 95% of inliers;
/// returns the share of outliers accepted at it.
FprAt95Tpr fpr_at_95tpr(std::span<const double> scores,
                        std::span<const std::int32_t> labels);

struct EvalReport {
  double auroc = 0.0;
  double tpr95fpr = 0.0;
  Index n_inliers = 0;
  Index n_outliers = 0;
  double threshold = 0.0;
};

EvalReport evaluate(std::span<const double> scores,
                    std::span<const std::int32_t> labels);

inline constexpr const char* kEvalCsvHeader =
    "auroc,tpr95fpr,n_inliers,n_outliers,threshold";
std::string report_csv_record(const EvalReport& report);
std::string report_text(const EvalReport& report);

struct ProbeConfig {
  double holdout_fraction = 0.3;
  double lr = 0.5;
  Index epochs = 300;
  std::uint64_t seed = 0;
};

/// Multinomial logistic regression trained by full-batch gradient descent on
/// frozen features (zero init, bias included); returns top-1 accuracy on a
/// per-class stratified holdout. Requires >= 2 classes with >= 2 rows each.
double linear_probe(const FeatureMatrix& features, const ProbeConfig& cfg);

}  // namespace occa
