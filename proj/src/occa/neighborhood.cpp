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

#include "occa/neighborhood.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "occa/binary_io.hpp"
#include "occa/error.hpp"
#include "occa/features.hpp"

namespace occa {
namespace {

constexpr std::string_view kPlanMagic = "OCNP";
constexpr std::uint32_t kPlanVersion = 1;

bool closer(const Neighbor& a, const Neighbor& b) {
  if (a.squared_distance != b.squared_distance) {
    return a.squared_distance < b.squared_distance;
  }
  return a.id < b.id;
}

}  // namespace

double Neighbor::distance() const { return std::sqrt(squared_distance); }

std::vector<Neighbor> knn_search(const Matrix& base, std::span<const float> query,
                                 Index k, std::optional<Index> exclude) {
  if (k == 0) fail(ErrorCode::kConfig, "k must be >= 1");
  if (query.size() != base.cols()) {
    fail(ErrorCode::kShapeMismatch, "query dimension " +
                                        std::to_string(query.size()) +
                                        " != " + std::to_string(base.cols()));
  }
  const Index candidates =
      base.rows() - (exclude && *exclude < base.rows() ? 1 : 0);
  if (k > candidates) {
    fail(ErrorCode::kKTooLarge, "k = " + std::to_string(k) + " but only " +
                                    std::to_string(candidates) +
                                    " candidate rows");
  }
  // Sorted buffer of the best k so far; rows are scanned in index order so a
  // later row only displaces on a strictly smaller distance.
  std::vector<Neighbor> best;
  best.reserve(k + 1);
  for (Index i = 0; i < base.rows(); ++i) {
    if (exclude && i == *exclude) continue;
    const Neighbor cand{i, squared_distance(base.row(i), query)};
    if (best.size() == k && !closer(cand, best.back())) continue;
    best.insert(std::upper_bound(best.begin(), best.end(), cand, closer), cand);
    if (best.size() > k) best.pop_back();
  }
  return best;
}

std::vector<Neighbor> knn_query(const Matrix& features, Index query_row, Index k) {
  if (query_row >= features.rows()) {
    fail(ErrorCode::kConfig, "query row " + std::to_string(query_row) +
                                 " out of range");
  }
  return knn_search(features, features.row(query_row), k, query_row);
}

double dynamic_threshold(double tau, double beta) {
  return tau + beta * (1.0 - tau);
}

NeighborPlan build_plan(const Matrix& features, Index k, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    fail(ErrorCode::kConfig, "beta must lie in [0, 1]");
  }
  const Index n = features.rows();
  const Index d = features.cols();
  if (k == 0) fail(ErrorCode::kConfig, "k must be >= 1");
  if (n < k + 1) {
    fail(ErrorCode::kKTooLarge, "building a plan with k = " + std::to_string(k) +
                                    " needs at least k + 1 rows, got " +
                                    std::to_string(n));
  }

  NeighborPlan plan;
  plan.k = k;
  plan.beta = beta;
  plan.neighbor_ids.resize(n * k);
  plan.targets = Matrix(n, d);

  double cos_sum = 0.0;
  std::vector<double> mean(d);
  for (Index i = 0; i < n; ++i) {
    const auto nbrs = knn_query(features, i, k);
    std::fill(mean.begin(), mean.end(), 0.0);
    for (Index r = 0; r < k; ++r) {
      plan.neighbor_ids[i * k + r] = static_cast<std::uint32_t>(nbrs[r].id);
      const auto row = features.row(nbrs[r].id);
      for (Index j = 0; j < d; ++j) mean[j] += row[j];
    }
    std::vector<float> mean_f(d);
    for (Index j = 0; j < d; ++j) {
      mean_f[j] = static_cast<float>(mean[j] / static_cast<double>(k));
    }
    const auto target = l2_normalize(mean_f);
    std::copy(target.begin(), target.end(), plan.targets.row(i).begin());
    cos_sum += cosine(l2_normalize(features.row(i)), target);
  }
  plan.tau = cos_sum / static_cast<double>(n);
  plan.sigma = dynamic_threshold(plan.tau, beta);
  return plan;
}

std::string encode_plan(const NeighborPlan& plan) {
  detail::ByteWriter w;
  w.raw(kPlanMagic);
  w.put<std::uint32_t>(kPlanVersion);
  w.put<std::uint64_t>(plan.rows());
  w.put<std::uint64_t>(plan.k);
  w.put<double>(plan.beta);
  w.put<double>(plan.tau);
  w.put<double>(plan.sigma);
  w.put_all<std::uint32_t>(plan.neighbor_ids);
  w.raw(encode_occf(plan.targets, nullptr));
  return w.bytes();
}

NeighborPlan decode_plan(std::string_view bytes, std::string_view what) {
  const std::string where(what);
  detail::ByteReader r(bytes, where);
  if (r.raw(4) != kPlanMagic) fail(ErrorCode::kFormat, where + ": bad magic");
  const auto version = r.get<std::uint32_t>();
  if (version != kPlanVersion) {
    fail(ErrorCode::kFormat, where + ": unsupported version " +
                                 std::to_string(version));
  }
  NeighborPlan plan;
  const auto n = r.get<std::uint64_t>();
  plan.k = r.get<std::uint64_t>();
  plan.beta = r.get<double>();
  plan.tau = r.get<double>();
  plan.sigma = r.get<double>();
  if (plan.k != 0 && n > r.remaining() / sizeof(std::uint32_t) / plan.k) {
    fail(ErrorCode::kFormat, where + ": truncated neighbor table");
  }
  plan.neighbor_ids.resize(n * plan.k);
  for (auto& id : plan.neighbor_ids) {
    id = r.get<std::uint32_t>();
    if (id >= n) fail(ErrorCode::kFormat, where + ": neighbor id out of range");
  }
  const auto rest = bytes.substr(r.position());
  std::size_t consumed = 0;
  auto targets = decode_occf(rest, &consumed, where + " (targets)");
  if (consumed != rest.size()) {
    fail(ErrorCode::kFormat, where + ": trailing bytes after targets");
  }
  if (targets.rows() != n) {
    fail(ErrorCode::kFormat, where + ": target rows do not match neighbor table");
  }
  plan.targets = std::move(targets.data);
  return plan;
}

void save_plan(const NeighborPlan& plan, const std::filesystem::path& path) {
  detail::write_file_atomic(path, encode_plan(plan));
}

NeighborPlan load_plan(const std::filesystem::path& path) {
  return decode_plan(detail::read_file(path), path.string());
}

}  // namespace occa
