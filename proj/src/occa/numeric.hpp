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

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace occa {

using Index = std::size_t;

// Vectors below this norm are treated as corrupt rather than renormalized.
inline constexpr double kNormEpsilon = 1e-12;

/// Dense row-major float matrix. Rows are samples, columns are feature
/// dimensions. The shape is fixed at construction.
class Matrix {
 public:
  Matrix() = default;
  Matrix(Index rows, Index cols);
  /// Takes ownership of `values` (row-major, rows * cols entries). Throws
  /// kShapeMismatch on a size mismatch and kFormat on non-finite entries.
  Matrix(Index rows, Index cols, std::vector<float> values);

  static Matrix identity(Index n);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  bool empty() const noexcept { return values_.empty(); }

  std::span<const float> row(Index i) const {
    return {values_.data() + i * cols_, cols_};
  }
  std::span<float> row(Index i) { return {values_.data() + i * cols_, cols_}; }

  float operator()(Index i, Index j) const { return values_[i * cols_ + j]; }
  float& operator()(Index i, Index j) { return values_[i * cols_ + j]; }

  std::span<const float> values() const noexcept { return values_; }
  std::span<float> values() noexcept { return values_; }

  bool operator==(const Matrix&) const = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<float> values_;
};

bool all_finite(std::span<const float> values);

// Reductions accumulate in double, left to right.
double dot(std::span<const float> a, std::span<const float> b);
double squared_norm(std::span<const float> v);
double norm(std::span<const float> v);
double squared_distance(std::span<const float> a, std::span<const float> b);

/// Unit vector in the direction of `v`. Throws kDegenerateVector when
/// ||v|| <= kNormEpsilon.
std::vector<float> l2_normalize(std::span<const float> v);

/// Dot product of two unit vectors clamped to [-1, 1].
double cosine(std::span<const float> u, std::span<const float> v);

/// Column means of `m`, accumulated in double.
std::vector<float> column_mean(const Matrix& m);

/// Deterministic random stream on top of std::mt19937_64, whose output
/// sequence is fixed by the C++ standard. Distributions are implemented
/// here rather than taken from <random> because the standard distribution
/// algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller; values come in cached pairs.
  double normal();
  /// Uniform integer in [0, bound), unbiased by rejection.
  std::uint64_t below(std::uint64_t bound);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (Index i = items.size(); i > 1; --i) {
      const Index j = static_cast<Index>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// SplitMix64 finalizer over (base, stream); used to give independent seeds
/// to sub-experiments.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

struct SgdOptions {
  double lr = 3e-4;
  double momentum = 0.9;
  double weight_decay = 1e-3;
};

/// Heavy-ball SGD with L2-style weight decay:
///   g <- g + wd * p;  m <- mu * m + g;  p <- p - lr * m
class SgdState {
 public:
  SgdState(SgdOptions options, Index num_params);

  const SgdOptions& options() const noexcept { return options_; }
  std::span<const float> momentum_buffer() const noexcept { return buffer_; }

 private:
  friend void sgd_step(std::span<float>, std::span<const float>, SgdState&);

  SgdOptions options_;
  std::vector<float> buffer_;
};

/// Applies one update in place. Throws kShapeMismatch when the parameter,
/// gradient and state sizes disagree.
void sgd_step(std::span<float> params, std::span<const float> grads,
              SgdState& state);

}  // namespace occa
