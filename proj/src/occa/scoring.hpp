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

#include <filesystem>
#include <vector>

#include "occa/features.hpp"
#include "occa/numeric.hpp"

namespace occa {

struct ScoreResult {
  /// One outlier score per test row; larger means more outlier-like.
  std::vector<double> scores;
  Index k_star = 0;
};

/// k-NN outlier score: mean squared Euclidean distance from each test row to
/// its k_star nearest training rows. With `normalize` both sides are
/// L2-normalized first. Throws kKTooLarge unless 1 <= k_star <= train rows.
ScoreResult occ_score(const Matrix& train, const Matrix& test, Index k_star,
                      bool normalize = false);

Matrix normalize_rows(const Matrix& m);

/// `id,score` with one line per test row.
std::string scores_to_csv(const ScoreResult& result);
/// OCCF container with two columns (row id, score); labels are attached when
/// given.
std::string scores_to_occf(const ScoreResult& result,
                           const std::vector<std::int32_t>* labels);

}  // namespace occa
