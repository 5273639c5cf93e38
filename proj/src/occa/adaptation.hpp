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
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "occa/features.hpp"
#include "occa/neighborhood.hpp"
#include "occa/numeric.hpp"

namespace occa {

// Trainable map applied on top of frozen embeddings. Both families start as
// the exact identity:
//   kLinear:       u = W x                    (W = I at init)
//   kResidualMlp:  u = x + W2 relu(W1 x + b1) (W2 = 0 at init)
enum class Architecture : std::uint8_t { kLinear = 0, kResidualMlp = 1 };

const char* architecture_name(Architecture arch);
Architecture parse_architecture(std::string_view name);

class AdapterParams {
 public:
  /// `hidden` is ignored for kLinear; 0 means "same as dim". W1 of the
  /// residual MLP is drawn N(0, 1/dim) from `seed`; b1 and W2 are zero.
  static AdapterParams identity(Architecture arch, Index dim, Index hidden,
                                std::uint64_t seed);
  /// Wraps existing values; throws kShapeMismatch if the count is wrong and
  /// kFormat if any value is non-finite.
  AdapterParams(Architecture arch, Index dim, Index hidden,
                std::vector<float> values);

  Architecture arch() const noexcept { return arch_; }
  Index dim() const noexcept { return dim_; }
  Index hidden() const noexcept { return hidden_; }

  // Flat parameter vector; the optimizer updates it in place.
  std::span<const float> values() const noexcept { return values_; }
  std::span<float> values() noexcept { return values_; }

  // Linear layout: W (dim x dim).
  // Residual layout: W1 (hidden x dim) | b1 (hidden) | W2 (dim x hidden).
  std::span<const float> weight() const;
  std::span<const float> w1() const;
  std::span<const float> b1() const;
  std::span<const float> w2() const;

  static Index param_count(Architecture arch, Index dim, Index hidden);

  bool operator==(const AdapterParams&) const = default;

 private:
  AdapterParams() = default;

  Architecture arch_ = Architecture::kLinear;
  Index dim_ = 0;
  Index hidden_ = 0;
  std::vector<float> values_;
};

/// Throws kShapeMismatch if x.size() != dim.
std::vector<float> adapter_forward(const AdapterParams& params,
                                   std::span<const float> x);
Matrix adapt_features(const AdapterParams& params, const Matrix& raw);

// Adapter container (little-endian):
//   "OCAD" | u32 version=1 | u8 arch | u64 dim | u64 hidden | u64 count
//   | count f32 parameters in the flat layout above
std::string encode_adapter(const AdapterParams& params);
AdapterParams decode_adapter(std::string_view bytes, std::string_view what);
void save_adapter(const AdapterParams& params, const std::filesystem::path& path);
AdapterParams load_adapter(const std::filesystem::path& path);

/// 1 when cos(fx, target) > sigma, else 0. Both inputs are unit vectors.
int hard_weight(std::span<const float> fx_unit, std::span<const float> target_unit,
                double sigma);

struct LossAndGrad {
  double loss = 0.0;
  /// Same layout as AdapterParams::values().
  std::vector<float> grads;
  /// Hard weight per batch entry (CA2 only).
  std::vector<std::uint8_t> weights;

  double active_fraction() const;
};

/// Batch mean of -w_i * cos(g(x_i), t_i) with w_i held constant. Gradients
/// flow through the normalization and back through the adapter.
LossAndGrad ca2_loss_and_grad(const AdapterParams& params,
                              std::span<const Index> batch_rows,
                              const Matrix& raw_features,
                              const NeighborPlan& plan);

/// Batch mean of ||g(x_i) - c||^2.
LossAndGrad center_loss_and_grad(const AdapterParams& params,
                                 std::span<const Index> batch_rows,
                                 const Matrix& raw_features,
                                 std::span<const float> center);

enum class Objective : std::uint8_t { kCa2 = 0, kCenter = 1 };

const char* objective_name(Objective objective);
Objective parse_objective(std::string_view name);

struct TrainConfig {
  Index k = 5;
  Index k_star = 2;
  double beta = 0.3;
  double lr = 3e-4;
  double momentum = 0.9;
  double weight_decay = 1e-3;
  Index batch_size = 512;
  Index patience = 10;
  Index max_epochs = 500;
  std::uint64_t seed = 0;
  Objective objective = Objective::kCa2;
  Architecture arch = Architecture::kResidualMlp;
  Index hidden = 0;  // 0: same as the feature dimension
};

/// Throws kConfig on invariant violations.
void validate(const TrainConfig& cfg);

enum class StopReason : std::uint8_t { kPatience = 0, kMaxEpochs = 1 };

const char* stop_reason_name(StopReason reason);

struct TrainLog {
  /// Entry 0 is measured on the initial (identity) adapter over the whole
  /// training set; entry e >= 1 is the sample-weighted mean of the batch
  /// losses seen during epoch e.
  std::vector<double> loss;
  /// Share of samples with w_i = 1 (always 1 for the center objective).
  std::vector<double> active_fraction;
  Index epochs_run = 0;
  Index best_epoch = 0;
  StopReason stop_reason = StopReason::kMaxEpochs;
  double tau = 0.0;
  double sigma = 0.0;
};

struct TrainResult {
  AdapterParams params;
  TrainLog log;
};

/// Called with the epoch number (0 before the first update) and the current
/// parameters after every epoch.
using EpochObserver = std::function<void(Index epoch, const AdapterParams&)>;

/// Builds the neighbor plan (or center) once from the raw features, then runs
/// shuffled mini-batch SGD until the epoch loss has not improved for
/// `patience` epochs or `max_epochs` is reached. Returns the parameters of
/// the best-loss epoch.
TrainResult train(const Matrix& features, const TrainConfig& cfg,
                  const EpochObserver& observer = {});

}  // namespace occa
