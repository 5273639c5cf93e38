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

#include "occa/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <iomanip>

#include "occa/error.hpp"

namespace occa {
namespace {

struct ClassCounts {
  Index inliers = 0;
  Index outliers = 0;
};

ClassCounts check_binary(std::span<const double> scores,
                         std::span<const std::int32_t> labels) {
  if (scores.size() != labels.size()) {
    fail(ErrorCode::kShapeMismatch, std::to_string(scores.size()) + " scores but " +
                                        std::to_string(labels.size()) + " labels");
  }
  ClassCounts counts;
  for (Index i = 0; i < labels.size(); ++i) {
    if (labels[i] == kInlierLabel) {
      ++counts.inliers;
    } else if (labels[i] == kOutlierLabel) {
      ++counts.outliers;
    } else {
      fail(ErrorCode::kConfig, "label " + std::to_string(labels[i]) +
                                   " is neither 0 (inlier) nor 1 (outlier)");
    }
    if (!std::isfinite(scores[i])) fail(ErrorCode::kNumeric, "non-finite score");
  }
  if (counts.inliers == 0 || counts.outliers == 0) {
    fail(ErrorCode::kSingleClass,
         "metrics need both inliers (label 0) and outliers (label 1); got " +
             std::to_string(counts.inliers) + " inliers and " +
             std::to_string(counts.outliers) + " outliers");
  }
  return counts;
}

void append_double(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

double auroc(std::span<const double> scores, std::span<const std::int32_t> labels) {
  const auto counts = check_binary(scores, labels);
  std::vector<Index> order(scores.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return scores[a] < scores[b]; });
  // Mann-Whitney U from mid-ranks; every quantity is a multiple of 1/2 and
  // stays exact in double.
  double outlier_rank_sum = 0.0;
  for (Index start = 0; start < order.size();) {
    Index end = start + 1;
    while (end < order.size() && scores[order[end]] == scores[order[start]]) ++end;
    const double mid_rank = 0.5 * static_cast<double>(start + 1 + end);
    for (Index r = start; r < end; ++r) {
      if (labels[order[r]] == kOutlierLabel) outlier_rank_sum += mid_rank;
    }
    start = end;
  }
  const double n1 = static_cast<double>(counts.outliers);
  const double n0 = static_cast<double>(counts.inliers);
  const double u = outlier_rank_sum - n1 * (n1 + 1.0) / 2.0;
  return u / (n1 * n0);
}

FprAt95Tpr fpr_at_95tpr(std::span<const double> scores,
                        std::span<const std::int32_t> labels) {
  const auto counts = check_binary(scores, labels);
  std::vector<double> inlier_scores;
  inlier_scores.reserve(counts.inliers);
  for (Index i = 0; i < scores.size(); ++i) {
    if (labels[i] == kInlierLabel) inlier_scores.push_back(scores[i]);
  }
  std::sort(inlier_scores.begin(), inlier_scores.end());
  // ceil(0.95 * n) in integer arithmetic
  const Index needed = (95 * counts.inliers + 99) / 100;
  FprAt95Tpr out;
  out.threshold = inlier_scores[needed - 1];
  Index accepted = 0;
  for (Index i = 0; i < scores.size(); ++i) {
    if (labels[i] == kOutlierLabel && scores[i] <= out.threshold) ++accepted;
  }
  out.fpr = static_cast<double>(accepted) / static_cast<double>(counts.outliers);
  return out;
}

EvalReport evaluate(std::span<const double> scores,
                    std::span<const std::int32_t> labels) {
  EvalReport report;
  report.auroc = auroc(scores, labels);
  const auto fpr = fpr_at_95tpr(scores, labels);
  report.tpr95fpr = fpr.fpr;
  report.threshold = fpr.threshold;
  for (const auto l : labels) {
    (l == kOutlierLabel ? report.n_outliers : report.n_inliers) += 1;
  }
  return report;
}

std::string report_csv_record(const EvalReport& report) {
  std::string out;
  append_double(out, report.auroc);
  out += ',';
  append_double(out, report.tpr95fpr);
  out += ',' + std::to_string(report.n_inliers) + ',' +
         std::to_string(report.n_outliers) + ',';
  append_double(out, report.threshold);
  return out;
}

std::string report_text(const EvalReport& report) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(4);
  ss << "AUROC       " << report.auroc << "\n"
     << "TPR95FPR    " << report.tpr95fpr << "\n"
     << "threshold   " << report.threshold << "\n"
     << "inliers     " << report.n_inliers << "\n"
     << "outliers    " << report.n_outliers << "\n";
  return ss.str();
}

double linear_probe(const FeatureMatrix& features, const ProbeConfig& cfg) {
  if (!features.labels) fail(ErrorCode::kConfig, "linear probe needs class labels");
  if (!(cfg.holdout_fraction > 0.0 && cfg.holdout_fraction < 1.0)) {
    fail(ErrorCode::kConfig, "holdout_fraction must lie in (0, 1)");
  }
  if (!(cfg.lr >= 0.0) || !std::isfinite(cfg.lr)) fail(ErrorCode::kConfig, "lr must be >= 0");

  std::map<std::int32_t, std::vector<Index>> by_class;
  for (Index i = 0; i < features.rows(); ++i) {
    by_class[(*features.labels)[i]].push_back(i);
  }
  if (by_class.size() < 2) fail(ErrorCode::kConfig, "linear probe needs >= 2 classes");

  Rng rng(cfg.seed);
  std::vector<Index> train_rows;
  std::vector<Index> test_rows;
  std::vector<Index> class_of(features.rows());
  Index class_index = 0;
  for (auto& [label, rows] : by_class) {
    if (rows.size() < 2) {
      fail(ErrorCode::kConfig, "class " + std::to_string(label) +
                                   " has fewer than 2 rows");
    }
    rng.shuffle(std::span<Index>(rows));
    const auto held = std::clamp<Index>(
        static_cast<Index>(std::lround(cfg.holdout_fraction * rows.size())), 1,
        rows.size() - 1);
    test_rows.insert(test_rows.end(), rows.begin(), rows.begin() + held);
    train_rows.insert(train_rows.end(), rows.begin() + held, rows.end());
    for (const Index r : rows) class_of[r] = class_index;
    ++class_index;
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());

  const Index classes = by_class.size();
  const Index d = features.dim();
  std::vector<double> weights(classes * d, 0.0);
  std::vector<double> bias(classes, 0.0);
  std::vector<double> logits(classes);
  auto compute_logits = [&](std::span<const float> x) {
    for (Index c = 0; c < classes; ++c) {
      double acc = bias[c];
      for (Index j = 0; j < d; ++j) acc += weights[c * d + j] * x[j];
      logits[c] = acc;
    }
  };

  std::vector<double> grad_w(classes * d);
  std::vector<double> grad_b(classes);
  const double inv_n = 1.0 / static_cast<double>(train_rows.size());
  for (Index epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    std::fill(grad_b.begin(), grad_b.end(), 0.0);
    for (const Index i : train_rows) {
      const auto x = features.data.row(i);
      compute_logits(x);
      const double peak = *std::max_element(logits.begin(), logits.end());
      double total = 0.0;
      for (auto& l : logits) total += (l = std::exp(l - peak));
      for (Index c = 0; c < classes; ++c) {
        const double g = (logits[c] / total - (c == class_of[i] ? 1.0 : 0.0)) * inv_n;
        grad_b[c] += g;
        for (Index j = 0; j < d; ++j) grad_w[c * d + j] += g * x[j];
      }
    }
    for (Index k = 0; k < weights.size(); ++k) weights[k] -= cfg.lr * grad_w[k];
    for (Index c = 0; c < classes; ++c) bias[c] -= cfg.lr * grad_b[c];
  }

  Index correct = 0;
  for (const Index i : test_rows) {
    compute_logits(features.data.row(i));
    const auto best = static_cast<Index>(
        std::max_element(logits.begin(), logits.end()) - logits.begin());
    if (best == class_of[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test_rows.size());
}

}  // namespace occa
