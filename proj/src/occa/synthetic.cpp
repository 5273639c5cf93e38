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

#include <cmath>
#include <string>

#include "occa/error.hpp"
#include "occa/features.hpp"

namespace occa {
namespace {

std::vector<float> random_unit(Index dim, Rng& rng) {
  std::vector<float> v(dim);
  for (auto& x : v) x = static_cast<float>(rng.normal());
  return l2_normalize(v);
}

// Unit vector at exactly `cos_to_anchor` from `anchor` (up to float rounding),
// in a random direction.
std::vector<float> anchored_unit(std::span<const float> anchor,
                                 double cos_to_anchor, Rng& rng) {
  while (true) {
    std::vector<float> r(anchor.size());
    for (auto& x : r) x = static_cast<float>(rng.normal());
    const double along = dot(r, anchor);
    for (Index j = 0; j < r.size(); ++j) {
      r[j] = static_cast<float>(r[j] - along * anchor[j]);
    }
    if (norm(r) <= 1e-6) continue;
    const auto ortho = l2_normalize(r);
    const double s = std::sqrt(1.0 - cos_to_anchor * cos_to_anchor);
    std::vector<float> c(anchor.size());
    for (Index j = 0; j < c.size(); ++j) {
      c[j] = static_cast<float>(cos_to_anchor * anchor[j] + s * ortho[j]);
    }
    return l2_normalize(c);
  }
}

// Draws candidates one at a time and keeps those compatible with every
// accepted center (except an exempt anchor). `budget` counts all candidate
// draws.
class CenterSampler {
 public:
  CenterSampler(const SyntheticSpec& spec, Rng& rng) : spec_(spec), rng_(rng) {}

  void add_free() {
    while (true) {
      auto c = random_unit(spec_.dim, rng_);
      if (try_accept(std::move(c), centers_.size())) return;
    }
  }

  void add_anchored(Index anchor) {
    while (true) {
      auto c = anchored_unit(centers_[anchor], spec_.outlier_anchor_cosine, rng_);
      if (try_accept(std::move(c), anchor)) return;
    }
  }

  std::vector<std::vector<float>> take() { return std::move(centers_); }

 private:
  bool try_accept(std::vector<float> c, Index exempt) {
    if (++draws_ > kCenterSamplingBudget) {
      fail(ErrorCode::kCenterSamplingFailed,
           "could not place " + std::to_string(spec_.inlier_classes +
                                               spec_.outlier_classes) +
               " centers in dimension " + std::to_string(spec_.dim) +
               " with pairwise cosine <= " +
               std::to_string(spec_.max_center_cosine) + " within " +
               std::to_string(kCenterSamplingBudget) + " draws");
    }
    for (Index i = 0; i < centers_.size(); ++i) {
      if (i == exempt) continue;
      if (dot(c, centers_[i]) > spec_.max_center_cosine) return false;
    }
    centers_.push_back(std::move(c));
    return true;
  }

  const SyntheticSpec& spec_;
  Rng& rng_;
  std::vector<std::vector<float>> centers_;
  int draws_ = 0;
};

void draw_cluster(std::span<const float> center, Index count,
                  const SyntheticSpec& spec, Rng& rng, std::vector<float>& out) {
  for (Index s = 0; s < count; ++s) {
    double scale = spec.noise_sigma;
    if (spec.noise_spread > 0.0) scale *= std::exp(spec.noise_spread * rng.normal());
    for (Index j = 0; j < spec.dim; ++j) {
      out.push_back(static_cast<float>(center[j] + scale * rng.normal()));
    }
  }
}

}  // namespace

void validate(const SyntheticSpec& spec) {
  auto bad = [](const std::string& what) { fail(ErrorCode::kConfig, what); };
  if (spec.dim < 2) bad("synthetic dim must be >= 2");
  if (spec.inlier_classes < 1) bad("synthetic inlier classes must be >= 1");
  if (spec.outlier_classes < 1) bad("synthetic outlier classes must be >= 1");
  if (spec.per_class < 1 || spec.test_per_class < 1 || spec.per_outlier_class < 1) {
    bad("synthetic per-class counts must be >= 1");
  }
  if (!(spec.noise_sigma > 0.0) || !std::isfinite(spec.noise_sigma)) {
    bad("synthetic noise_sigma must be > 0");
  }
  if (!(spec.max_center_cosine > -1.0 && spec.max_center_cosine < 1.0)) {
    bad("max_center_cosine must lie in (-1, 1)");
  }
  if (!(spec.noise_spread >= 0.0) || !std::isfinite(spec.noise_spread)) {
    bad("noise_spread must be >= 0");
  }
  if (!(spec.outlier_anchor_cosine >= 0.0 && spec.outlier_anchor_cosine < 1.0)) {
    bad("outlier_anchor_cosine must lie in [0, 1)");
  }
}

std::pair<FeatureMatrix, FeatureMatrix> gen_synthetic(const SyntheticSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);

  CenterSampler sampler(spec, rng);
  for (Index c = 0; c < spec.inlier_classes; ++c) sampler.add_free();
  for (Index c = 0; c < spec.outlier_classes; ++c) {
    if (spec.outlier_anchor_cosine > 0.0) {
      sampler.add_anchored(static_cast<Index>(rng.below(spec.inlier_classes)));
    } else {
      sampler.add_free();
    }
  }
  const auto centers = sampler.take();

  std::vector<float> train_values;
  std::vector<std::int32_t> train_labels;
  for (Index c = 0; c < spec.inlier_classes; ++c) {
    draw_cluster(centers[c], spec.per_class, spec, rng, train_values);
    train_labels.insert(train_labels.end(), spec.per_class,
                        static_cast<std::int32_t>(c));
  }

  std::vector<float> test_values;
  std::vector<std::int32_t> test_labels;
  for (Index c = 0; c < spec.inlier_classes; ++c) {
    draw_cluster(centers[c], spec.test_per_class, spec, rng, test_values);
    test_labels.insert(test_labels.end(), spec.test_per_class, kInlierLabel);
  }
  for (Index c = 0; c < spec.outlier_classes; ++c) {
    draw_cluster(centers[spec.inlier_classes + c], spec.per_outlier_class, spec,
                 rng, test_values);
    test_labels.insert(test_labels.end(), spec.per_outlier_class, kOutlierLabel);
  }

  const Index n_train = train_labels.size();
  const Index n_test = test_labels.size();
  FeatureMatrix train{Matrix(n_train, spec.dim, std::move(train_values)),
                      std::move(train_labels)};
  FeatureMatrix test{Matrix(n_test, spec.dim, std::move(test_values)),
                     std::move(test_labels)};
  return {std::move(train), std::move(test)};
}

}  // namespace occa
