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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "occa/numeric.hpp"

namespace occa {

inline constexpr std::int32_t kInlierLabel = 0;
inline constexpr std::int32_t kOutlierLabel = 1;

/// An n x d embedding matrix with optional per-row labels. Training files
/// carry class ids (>= 0); test files carry 0 for one-class samples and 1
/// for outliers. Row identifiers are the row indices.
struct FeatureMatrix {
  Matrix data;
  std::optional<std::vector<std::int32_t>> labels;

  Index rows() const noexcept { return data.rows(); }
  Index dim() const noexcept { return data.cols(); }
  bool has_labels() const noexcept { return labels.has_value(); }

  bool operator==(const FeatureMatrix&) const = default;
};

/// Throws kFormat unless n >= 1, d >= 2, labels (if any) have length n and
/// every value is finite.
void validate(const FeatureMatrix& fm);

enum class FileFormat { kBinary, kCsv };

// OCCF binary layout (all integers little-endian):
//   "OCCF" | u32 version=1 | u8 flags (bit0: labels) | u64 n | u64 d
//   | n*d f32 row-major | [n i32 labels]
inline constexpr std::string_view kOccfMagic = "OCCF";
inline constexpr std::uint32_t kOccfVersion = 1;

std::string encode_occf(const Matrix& data,
                        const std::vector<std::int32_t>* labels);
/// Decodes one OCCF container starting at the beginning of `bytes`. On
/// return `consumed` holds the container length so callers can embed OCCF
/// inside larger files. Performs no FeatureMatrix validation.
FeatureMatrix decode_occf(std::string_view bytes, std::size_t* consumed,
                          std::string_view what);

std::string encode_csv(const FeatureMatrix& fm);
FeatureMatrix decode_csv(std::string_view text, std::string_view what);

void save_features(const FeatureMatrix& fm, const std::filesystem::path& path,
                   FileFormat format);
/// Detects the format from the leading magic bytes.
FeatureMatrix load_features(const std::filesystem::path& path);

struct SyntheticSpec {
  Index dim = 64;
  Index inlier_classes = 4;
  Index per_class = 100;
  Index test_per_class = 50;
  double noise_sigma = 0.1;
  Index outlier_classes = 4;
  Index per_outlier_class = 100;
  /// Upper bound on the pairwise cosine between any two class centers.
  double max_center_cosine = 0.5;
  /// Per-sample noise scale is noise_sigma * exp(noise_spread * z), z ~ N(0,1).
  /// Zero gives homoscedastic classes.
  double noise_spread = 0.0;
  /// When > 0, each outlier center is placed at this cosine to a randomly
  /// chosen inlier center instead of being drawn freely.
  double outlier_anchor_cosine = 0.0;
  std::uint64_t seed = 0;
};

void validate(const SyntheticSpec& spec);

/// Gaussian class clusters around unit-norm centers. Train holds the inlier
/// classes only (label = class id); test holds fresh inlier draws (label 0)
/// followed by outlier draws (label 1). Throws kCenterSamplingFailed when
/// the center constraint cannot be met within kCenterSamplingBudget draws.
std::pair<FeatureMatrix, FeatureMatrix> gen_synthetic(const SyntheticSpec& spec);

inline constexpr int kCenterSamplingBudget = 10000;

}  // namespace occa
