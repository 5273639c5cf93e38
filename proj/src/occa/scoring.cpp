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

#include "occa/scoring.hpp"

#include <charconv>
#include <string>

#include "occa/error.hpp"
#include "occa/neighborhood.hpp"

namespace occa {

Matrix normalize_rows(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i) {
    const auto unit = l2_normalize(m.row(i));
    std::copy(unit.begin(), unit.end(), out.row(i).begin());
  }
  return out;
}

ScoreResult occ_score(const Matrix& train, const Matrix& test, Index k_star,
                      bool normalize) {
  if (k_star < 1 || k_star > train.rows()) {
    fail(ErrorCode::kKTooLarge, "k_star = " + std::to_string(k_star) +
                                    " with " + std::to_string(train.rows()) +
                                    " training rows");
  }
  if (train.cols() != test.cols()) {
    fail(ErrorCode::kShapeMismatch, "train dimension " +
                                        std::to_string(train.cols()) +
                                        " != test dimension " +
                                        std::to_string(test.cols()));
  }
  if (normalize) return occ_score(normalize_rows(train), normalize_rows(test), k_star);

  ScoreResult result;
  result.k_star = k_star;
  result.scores.reserve(test.rows());
  for (Index i = 0; i < test.rows(); ++i) {
    const auto nbrs = knn_search(train, test.row(i), k_star);
    double sum = 0.0;
    for (const auto& nb : nbrs) sum += nb.squared_distance;
    result.scores.push_back(sum / static_cast<double>(k_star));
  }
  return result;
}

std::string scores_to_csv(const ScoreResult& result) {
  std::string out = "id,score\n";
  char buf[64];
  for (Index i = 0; i < result.scores.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    const auto res = std::to_chars(buf, buf + sizeof(buf), result.scores[i]);
    out.append(buf, res.ptr);
    out += '\n';
  }
  return out;
}

std::string scores_to_occf(const ScoreResult& result,
                           const std::vector<std::int32_t>* labels) {
  Matrix m(result.scores.size(), 2);
  for (Index i = 0; i < result.scores.size(); ++i) {
    m(i, 0) = static_cast<float>(i);
    m(i, 1) = static_cast<float>(result.scores[i]);
  }
  return encode_occf(m, labels);
}

}  // namespace occa
