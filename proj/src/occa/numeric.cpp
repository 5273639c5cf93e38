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

#include "occa/numeric.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>
#include <string>

#include "occa/error.hpp"

namespace occa {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kFormat: return "FormatError";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kDegenerateVector: return "DegenerateVector";
    case ErrorCode::kKTooLarge: return "KTooLarge";
    case ErrorCode::kSingleClass: return "SingleClass";
    case ErrorCode::kCenterSamplingFailed: return "CenterSamplingFailed";
    case ErrorCode::kNumeric: return "NumericError";
  }
  return "UnknownError";
}

Matrix::Matrix(Index rows, Index cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0f) {}

Matrix::Matrix(Index rows, Index cols, std::vector<float> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    fail(ErrorCode::kShapeMismatch,
         "matrix of shape " + std::to_string(rows_) + "x" +
             std::to_string(cols_) + " given " +
             std::to_string(values_.size()) + " values");
  }
  if (!all_finite(values_)) {
    fail(ErrorCode::kFormat, "matrix contains non-finite values");
  }
}

Matrix Matrix::identity(Index n) {
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) m(i, i) = 1.0f;
  return m;
}

bool all_finite(std::span<const float> values) {
  return std::all_of(values.begin(), values.end(),
                     [](float v) { return std::isfinite(v); });
}

double dot(std::span<const float> a, std::span<const float> b) {
  assert(a.size() == b.size());
  double acc = 0.0;
  for (Index i = 0; i < a.size(); ++i) {
    acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return acc;
}

double squared_norm(std::span<const float> v) { return dot(v, v); }

double norm(std::span<const float> v) { return std::sqrt(squared_norm(v)); }

double squared_distance(std::span<const float> a, std::span<const float> b) {
  assert(a.size() == b.size());
  double acc = 0.0;
  for (Index i = 0; i < a.size(); ++i) {
    const double diff = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc += diff * diff;
  }
  return acc;
}

std::vector<float> l2_normalize(std::span<const float> v) {
  const double n = norm(v);
  if (!(n > kNormEpsilon)) {
    fail(ErrorCode::kDegenerateVector,
         "cannot normalize vector with norm " + std::to_string(n));
  }
  std::vector<float> out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    out[i] = static_cast<float>(static_cast<double>(v[i]) / n);
  }
  return out;
}

double cosine(std::span<const float> u, std::span<const float> v) {
  assert(std::abs(norm(u) - 1.0) < 1e-4 && std::abs(norm(v) - 1.0) < 1e-4);
  return std::clamp(dot(u, v), -1.0, 1.0);
}

std::vector<float> column_mean(const Matrix& m) {
  std::vector<double> acc(m.cols(), 0.0);
  for (Index i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    for (Index j = 0; j < m.cols(); ++j) acc[j] += r[j];
  }
  std::vector<float> out(m.cols());
  for (Index j = 0; j < m.cols(); ++j) {
    out[j] = static_cast<float>(acc[j] / static_cast<double>(m.rows()));
  }
  return out;
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // 1 - uniform() lies in (0, 1], so the log is finite.
  const double radius = std::sqrt(-2.0 * std::log(1.0 - uniform()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  assert(bound > 0);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % bound;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SgdState::SgdState(SgdOptions options, Index num_params)
    : options_(options), buffer_(num_params, 0.0f) {
  if (!(options_.lr >= 0.0) || !(options_.momentum >= 0.0) ||
      !(options_.momentum < 1.0) || !(options_.weight_decay >= 0.0)) {
    fail(ErrorCode::kConfig,
         "sgd requires lr >= 0, 0 <= momentum < 1, weight_decay >= 0");
  }
}

void sgd_step(std::span<float> params, std::span<const float> grads,
              SgdState& state) {
  if (params.size() != grads.size() || params.size() != state.buffer_.size()) {
    fail(ErrorCode::kShapeMismatch,
         "sgd_step: " + std::to_string(params.size()) + " params, " +
             std::to_string(grads.size()) + " grads, " +
             std::to_string(state.buffer_.size()) + " momentum slots");
  }
  const auto& opt = state.options_;
  for (Index i = 0; i < params.size(); ++i) {
    const double g = static_cast<double>(grads[i]) +
                     opt.weight_decay * static_cast<double>(params[i]);
    const double m = opt.momentum * static_cast<double>(state.buffer_[i]) + g;
    state.buffer_[i] = static_cast<float>(m);
    params[i] = static_cast<float>(static_cast<double>(params[i]) - opt.lr * m);
  }
}

}  // namespace occa
