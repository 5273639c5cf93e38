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


// Helpers shared by the unit and acceptance tests. Oracles here are written
// independently of the library code they check.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "occa/error.hpp"
#include "occa/numeric.hpp"
#include "support/temp_dir.hpp"

namespace occa::testing {

// Runs `f` and returns the library error code it threw, if any.
template <typename F>
std::optional<ErrorCode> error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline Matrix random_matrix(Index rows, Index cols, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(0.0, scale);
  std::vector<float> values(rows * cols);
  for (auto& v : values) v = static_cast<float>(dist(gen));
  return Matrix(rows, cols, std::move(values));
}

// Squared distance accumulated in long double, in a different order from the
// library (back to front).
inline long double oracle_sq_dist(const Matrix& a, Index i, const Matrix& b, Index j) {
  long double s = 0.0L;
  for (Index c = a.cols(); c-- > 0;) {
    const long double d = static_cast<long double>(a(i, c)) - b(j, c);
    s += d * d;
  }
  return s;
}

// Quadratic scan: all candidates sorted by (distance, id).
inline std::vector<Index> oracle_knn(const Matrix& base, const Matrix& query, Index q, Index k,
                                     bool exclude_self) {
  std::vector<std::pair<long double, Index>> all;
  for (Index j = 0; j < base.rows(); ++j) {
    if (exclude_self && j == q) continue;
    all.emplace_back(oracle_sq_dist(query, q, base, j), j);
  }
  std::sort(all.begin(), all.end());
  std::vector<Index> ids;
  for (Index t = 0; t < k; ++t) ids.push_back(all[t].second);
  return ids;
}

// Mann-Whitney by enumerating every (outlier, inlier) pair.
inline double oracle_auroc(const std::vector<double>& scores, const std::vector<std::int32_t>& labels) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

}  // namespace occa::testing
