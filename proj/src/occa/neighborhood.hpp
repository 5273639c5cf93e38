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
#include <span>
#include <string>
#include <vector>

#include "occa/numeric.hpp"

namespace occa {

struct Neighbor {
  Index id = 0;
  /// Squared Euclidean distance to the query.
  double squared_distance = 0.0;

  double distance() const;
  bool operator==(const Neighbor&) const = default;
};

/// Exact brute-force search: the `k` rows of `base` closest to `query` in
/// Euclidean distance, ascending, ties broken by lower row index. Row
/// `exclude` (if given) is skipped. Throws kKTooLarge when fewer than `k`
/// candidate rows exist and kConfig when k == 0.
std::vector<Neighbor> knn_search(const Matrix& base, std::span<const float> query,
                                 Index k, std::optional<Index> exclude = {});

/// Neighbors of a row of `features` among the other rows; 1 <= k <= n-1.
std::vector<Neighbor> knn_query(const Matrix& features, Index query_row, Index k);

/// Frozen neighborhood targets computed once from the pre-adaptation
/// features.
struct NeighborPlan {
  Index k = 0;
  double beta = 0.0;
  /// rows x k, row-major; row i never contains i.
  std::vector<std::uint32_t> neighbor_ids;
  /// Unit-norm mean of each row's neighbors.
  Matrix targets;
  /// Mean cosine between each normalized row and its target.
  double tau = 0.0;
  /// Hard-weight threshold tau + beta * (1 - tau).
  double sigma = 0.0;

  Index rows() const noexcept { return targets.rows(); }
  std::span<const std::uint32_t> neighbors_of(Index i) const {
    return {neighbor_ids.data() + i * k, k};
  }

  bool operator==(const NeighborPlan&) const = default;
};

double dynamic_threshold(double tau, double beta);

/// Requires n >= k + 1 and beta in [0, 1]. Throws kDegenerateVector when a
/// row or a neighbor mean has near-zero norm.
NeighborPlan build_plan(const Matrix& features, Index k, double beta);

// Plan container (little-endian):
//   "OCNP" | u32 version=1 | u64 n | u64 k | f64 beta | f64 tau | f64 sigma
//   | n*k u32 neighbor ids | OCCF container holding the n x d targets
std::string encode_plan(const NeighborPlan& plan);
NeighborPlan decode_plan(std::string_view bytes, std::string_view what);
void save_plan(const NeighborPlan& plan, const std::filesystem::path& path);
NeighborPlan load_plan(const std::filesystem::path& path);

}  // namespace occa
