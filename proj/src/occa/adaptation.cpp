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

#include "occa/adaptation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "occa/binary_io.hpp"
#include "occa/error.hpp"

namespace occa {
namespace {

constexpr std::string_view kAdapterMagic = "OCAD";
constexpr std::uint32_t kAdapterVersion = 1;

// Activations of one forward pass, kept in double for the backward pass.
struct Activations {
  std::vector<double> x;
  std::vector<double> pre;  // W1 x + b1
  std::vector<double> hid;  // relu(pre)
  std::vector<double> out;
};

void forward(const AdapterParams& p, std::span<const float> x, Activations& act) {
  const Index d = p.dim();
  if (x.size() != d) {
    fail(ErrorCode::kShapeMismatch, "adapter expects dimension " +
                                        std::to_string(d) + ", got " +
                                        std::to_string(x.size()));
  }
  act.x.assign(x.begin(), x.end());
  act.out.assign(d, 0.0);
  if (p.arch() == Architecture::kLinear) {
    const auto w = p.weight();
    for (Index r = 0; r < d; ++r) {
      const float* wr = w.data() + r * d;
      double acc = 0.0;
      for (Index j = 0; j < d; ++j) acc += static_cast<double>(wr[j]) * act.x[j];
      act.out[r] = acc;
    }
    return;
  }
  const Index h = p.hidden();
  const auto w1 = p.w1();
  const auto b1 = p.b1();
  const auto w2 = p.w2();
  act.pre.assign(h, 0.0);
  act.hid.assign(h, 0.0);
  for (Index k = 0; k < h; ++k) {
    const float* wk = w1.data() + k * d;
    double acc = b1[k];
    for (Index j = 0; j < d; ++j) acc += static_cast<double>(wk[j]) * act.x[j];
    act.pre[k] = acc;
    act.hid[k] = acc > 0.0 ? acc : 0.0;
  }
  for (Index r = 0; r < d; ++r) {
    const float* wr = w2.data() + r * h;
    double acc = 0.0;
    for (Index k = 0; k < h; ++k) acc += static_cast<double>(wr[k]) * act.hid[k];
    act.out[r] = act.x[r] + acc;
  }
}

// Accumulates d(loss)/d(params) given d(loss)/d(out) into `grads`.
void backward(const AdapterParams& p, const Activations& act,
              std::span<const double> grad_out, std::vector<double>& grads) {
  const Index d = p.dim();
  if (p.arch() == Architecture::kLinear) {
    for (Index r = 0; r < d; ++r) {
      if (grad_out[r] == 0.0) continue;
      double* gr = grads.data() + r * d;
      for (Index j = 0; j < d; ++j) gr[j] += grad_out[r] * act.x[j];
    }
    return;
  }
  const Index h = p.hidden();
  const auto w2 = p.w2();
  double* g_w1 = grads.data();
  double* g_b1 = g_w1 + h * d;
  double* g_w2 = g_b1 + h;
  std::vector<double> grad_pre(h, 0.0);
  for (Index r = 0; r < d; ++r) {
    const double g = grad_out[r];
    if (g == 0.0) continue;
    const float* wr = w2.data() + r * h;
    double* gr = g_w2 + r * h;
    for (Index k = 0; k < h; ++k) {
      gr[k] += g * act.hid[k];
      grad_pre[k] += static_cast<double>(wr[k]) * g;
    }
  }
  for (Index k = 0; k < h; ++k) {
    if (!(act.pre[k] > 0.0)) continue;
    const double g = grad_pre[k];
    g_b1[k] += g;
    double* gk = g_w1 + k * d;
    for (Index j = 0; j < d; ++j) gk[j] += g * act.x[j];
  }
}

std::vector<float> to_float(const std::vector<double>& v) {
  return {v.begin(), v.end()};
}

void check_batch(std::span<const Index> batch, const Matrix& raw,
                 const AdapterParams& params) {
  if (batch.empty()) fail(ErrorCode::kConfig, "empty batch");
  if (raw.cols() != params.dim()) {
    fail(ErrorCode::kShapeMismatch, "features have dimension " +
                                        std::to_string(raw.cols()) +
                                        ", adapter expects " +
                                        std::to_string(params.dim()));
  }
  for (const Index i : batch) {
    if (i >= raw.rows()) {
      fail(ErrorCode::kConfig, "batch row " + std::to_string(i) + " out of range");
    }
  }
}

}  // namespace

const char* architecture_name(Architecture arch) {
  return arch == Architecture::kLinear ? "linear" : "residual-mlp";
}

Architecture parse_architecture(std::string_view name) {
  if (name == "linear") return Architecture::kLinear;
  if (name == "residual-mlp") return Architecture::kResidualMlp;
  fail(ErrorCode::kConfig, "unknown architecture '" + std::string(name) + "'");
}

Index AdapterParams::param_count(Architecture arch, Index dim, Index hidden) {
  return arch == Architecture::kLinear ? dim * dim : 2 * hidden * dim + hidden;
}

AdapterParams AdapterParams::identity(Architecture arch, Index dim, Index hidden,
                                      std::uint64_t seed) {
  if (dim == 0) fail(ErrorCode::kConfig, "adapter dimension must be >= 1");
  AdapterParams p;
  p.arch_ = arch;
  p.dim_ = dim;
  p.hidden_ = arch == Architecture::kLinear ? 0 : (hidden == 0 ? dim : hidden);
  p.values_.assign(param_count(arch, dim, p.hidden_), 0.0f);
  if (arch == Architecture::kLinear) {
    for (Index i = 0; i < dim; ++i) p.values_[i * dim + i] = 1.0f;
  } else {
    Rng rng(seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    for (Index i = 0; i < p.hidden_ * dim; ++i) {
      p.values_[i] = static_cast<float>(scale * rng.normal());
    }
  }
  return p;
}

AdapterParams::AdapterParams(Architecture arch, Index dim, Index hidden,
                             std::vector<float> values)
    : arch_(arch),
      dim_(dim),
      hidden_(arch == Architecture::kLinear ? 0 : hidden),
      values_(std::move(values)) {
  if (dim_ == 0 || (arch_ == Architecture::kResidualMlp && hidden_ == 0) ||
      values_.size() != param_count(arch_, dim_, hidden_)) {
    fail(ErrorCode::kShapeMismatch, "adapter parameter count does not match "
                                    "its architecture");
  }
  if (!all_finite(values_)) {
    fail(ErrorCode::kFormat, "adapter parameters contain non-finite values");
  }
}

std::span<const float> AdapterParams::weight() const {
  return std::span<const float>(values_).first(dim_ * dim_);
}
std::span<const float> AdapterParams::w1() const {
  return std::span<const float>(values_).subspan(0, hidden_ * dim_);
}
std::span<const float> AdapterParams::b1() const {
  return std::span<const float>(values_).subspan(hidden_ * dim_, hidden_);
}
std::span<const float> AdapterParams::w2() const {
  return std::span<const float>(values_).subspan(hidden_ * dim_ + hidden_,
                                                  dim_ * hidden_);
}

std::vector<float> adapter_forward(const AdapterParams& params,
                                   std::span<const float> x) {
  Activations act;
  forward(params, x, act);
  return to_float(act.out);
}

Matrix adapt_features(const AdapterParams& params, const Matrix& raw) {
  if (raw.cols() != params.dim()) {
    fail(ErrorCode::kShapeMismatch, "features have dimension " +
                                        std::to_string(raw.cols()) +
                                        ", adapter expects " +
                                        std::to_string(params.dim()));
  }
  Matrix out(raw.rows(), raw.cols());
  Activations act;
  for (Index i = 0; i < raw.rows(); ++i) {
    forward(params, raw.row(i), act);
    auto dst = out.row(i);
    for (Index j = 0; j < dst.size(); ++j) dst[j] = static_cast<float>(act.out[j]);
  }
  if (!all_finite(out.values())) {
    fail(ErrorCode::kNumeric, "adapted features are not finite");
  }
  return out;
}

std::string encode_adapter(const AdapterParams& params) {
  detail::ByteWriter w;
  w.raw(kAdapterMagic);
  w.put<std::uint32_t>(kAdapterVersion);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(params.arch()));
  w.put<std::uint64_t>(params.dim());
  w.put<std::uint64_t>(params.hidden());
  w.put<std::uint64_t>(params.values().size());
  w.put_all<float>(params.values());
  return w.bytes();
}

AdapterParams decode_adapter(std::string_view bytes, std::string_view what) {
  const std::string where(what);
  detail::ByteReader r(bytes, where);
  if (r.raw(4) != kAdapterMagic) fail(ErrorCode::kFormat, where + ": bad magic");
  const auto version = r.get<std::uint32_t>();
  if (version != kAdapterVersion) {
    fail(ErrorCode::kFormat, where + ": unsupported version " +
                                 std::to_string(version));
  }
  const auto tag = r.get<std::uint8_t>();
  if (tag > static_cast<std::uint8_t>(Architecture::kResidualMlp)) {
    fail(ErrorCode::kFormat, where + ": unknown architecture tag");
  }
  const auto arch = static_cast<Architecture>(tag);
  const auto dim = r.get<std::uint64_t>();
  const auto hidden = r.get<std::uint64_t>();
  const auto count = r.get<std::uint64_t>();
  if (count != r.remaining() / sizeof(float) ||
      r.remaining() % sizeof(float) != 0) {
    fail(ErrorCode::kFormat, where + ": parameter block size mismatch");
  }
  std::vector<float> values(count);
  for (auto& v : values) v = r.get<float>();
  try {
    return AdapterParams(arch, dim, hidden, std::move(values));
  } catch (const Error& e) {
    fail(ErrorCode::kFormat, where + ": " + e.what());
  }
}

void save_adapter(const AdapterParams& params, const std::filesystem::path& path) {
  detail::write_file_atomic(path, encode_adapter(params));
}

AdapterParams load_adapter(const std::filesystem::path& path) {
  return decode_adapter(detail::read_file(path), path.string());
}

int hard_weight(std::span<const float> fx_unit, std::span<const float> target_unit,
                double sigma) {
  return cosine(fx_unit, target_unit) > sigma ? 1 : 0;
}

double LossAndGrad::active_fraction() const {
  if (weights.empty()) return 1.0;
  const auto active = std::count(weights.begin(), weights.end(), std::uint8_t{1});
  return static_cast<double>(active) / static_cast<double>(weights.size());
}

LossAndGrad ca2_loss_and_grad(const AdapterParams& params,
                              std::span<const Index> batch_rows,
                              const Matrix& raw_features,
                              const NeighborPlan& plan) {
  check_batch(batch_rows, raw_features, params);
  if (plan.rows() != raw_features.rows() ||
      plan.targets.cols() != raw_features.cols()) {
    fail(ErrorCode::kShapeMismatch, "neighbor plan does not match the features");
  }
  const Index d = params.dim();
  const double inv_batch = 1.0 / static_cast<double>(batch_rows.size());
  std::vector<double> grads(params.values().size(), 0.0);
  std::vector<double> grad_out(d);
  Activations act;
  LossAndGrad result;
  result.weights.reserve(batch_rows.size());
  double loss = 0.0;
  for (const Index i : batch_rows) {
    forward(params, raw_features.row(i), act);
    const auto target = plan.targets.row(i);
    double sq = 0.0;
    double ut = 0.0;
    for (Index j = 0; j < d; ++j) {
      sq += act.out[j] * act.out[j];
      ut += act.out[j] * static_cast<double>(target[j]);
    }
    const double len = std::sqrt(sq);
    if (!(len > kNormEpsilon)) {
      fail(ErrorCode::kDegenerateVector,
           "adapted feature of row " + std::to_string(i) + " has zero norm");
    }
    const double cos = ut / len;
    const bool active = std::clamp(cos, -1.0, 1.0) > plan.sigma;
    result.weights.push_back(active ? 1 : 0);
    if (!active) continue;
    loss -= cos * inv_batch;
    // d cos / du = (t - (u.t / |u|^2) u) / |u|
    const double coef = ut / sq;
    for (Index j = 0; j < d; ++j) {
      grad_out[j] = -inv_batch * (static_cast<double>(target[j]) - coef * act.out[j]) / len;
    }
    backward(params, act, grad_out, grads);
  }
  result.loss = loss;
  result.grads = to_float(grads);
  return result;
}

LossAndGrad center_loss_and_grad(const AdapterParams& params,
                                 std::span<const Index> batch_rows,
                                 const Matrix& raw_features,
                                 std::span<const float> center) {
  check_batch(batch_rows, raw_features, params);
  if (center.size() != params.dim()) {
    fail(ErrorCode::kShapeMismatch, "center has dimension " +
                                        std::to_string(center.size()) +
                                        ", adapter expects " +
                                        std::to_string(params.dim()));
  }
  const Index d = params.dim();
  const double inv_batch = 1.0 / static_cast<double>(batch_rows.size());
  std::vector<double> grads(params.values().size(), 0.0);
  std::vector<double> grad_out(d);
  Activations act;
  double loss = 0.0;
  for (const Index i : batch_rows) {
    forward(params, raw_features.row(i), act);
    for (Index j = 0; j < d; ++j) {
      const double diff = act.out[j] - static_cast<double>(center[j]);
      loss += diff * diff * inv_batch;
      grad_out[j] = 2.0 * diff * inv_batch;
    }
    backward(params, act, grad_out, grads);
  }
  LossAndGrad result;
  result.loss = loss;
  result.grads = to_float(grads);
  return result;
}

const char* objective_name(Objective objective) {
  return objective == Objective::kCa2 ? "ca2" : "center";
}

Objective parse_objective(std::string_view name) {
  if (name == "ca2") return Objective::kCa2;
  if (name == "center") return Objective::kCenter;
  fail(ErrorCode::kConfig, "unknown objective '" + std::string(name) + "'");
}

const char* stop_reason_name(StopReason reason) {
  return reason == StopReason::kPatience ? "patience" : "max_epochs";
}

void validate(const TrainConfig& cfg) {
  auto bad = [](const std::string& what) { fail(ErrorCode::kConfig, what); };
  if (cfg.k < 1) bad("k must be >= 1");
  if (cfg.k_star < 1) bad("k_star must be >= 1");
  if (!(cfg.beta >= 0.0 && cfg.beta <= 1.0)) bad("beta must lie in [0, 1]");
  if (!(cfg.lr >= 0.0) || !std::isfinite(cfg.lr)) bad("lr must be >= 0");
  if (!(cfg.momentum >= 0.0 && cfg.momentum < 1.0)) bad("momentum must lie in [0, 1)");
  if (!(cfg.weight_decay >= 0.0) || !std::isfinite(cfg.weight_decay)) {
    bad("weight_decay must be >= 0");
  }
  if (cfg.batch_size < 1) bad("batch_size must be >= 1");
  if (cfg.patience < 1) bad("patience must be >= 1");
  if (cfg.max_epochs < 1) bad("max_epochs must be >= 1");
}

TrainResult train(const Matrix& features, const TrainConfig& cfg,
                  const EpochObserver& observer) {
  validate(cfg);
  const Index n = features.rows();
  const Index d = features.cols();
  if (n < cfg.k + 1) {
    fail(ErrorCode::kConfig, "training needs at least k + 1 = " +
                                 std::to_string(cfg.k + 1) + " rows, got " +
                                 std::to_string(n));
  }

  AdapterParams params =
      AdapterParams::identity(cfg.arch, d, cfg.hidden, derive_seed(cfg.seed, 0));
  Rng rng(derive_seed(cfg.seed, 1));

  NeighborPlan plan;
  std::vector<float> center;
  TrainLog log;
  if (cfg.objective == Objective::kCa2) {
    plan = build_plan(features, cfg.k, cfg.beta);
    log.tau = plan.tau;
    log.sigma = plan.sigma;
  } else {
    center = column_mean(features);
  }
  auto evaluate = [&](std::span<const Index> rows) {
    return cfg.objective == Objective::kCa2
               ? ca2_loss_and_grad(params, rows, features, plan)
               : center_loss_and_grad(params, rows, features, center);
  };

  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  {
    const auto initial = evaluate(order);
    log.loss.push_back(initial.loss);
    log.active_fraction.push_back(initial.active_fraction());
  }
  if (observer) observer(0, params);

  AdapterParams best = params;
  double best_loss = log.loss.front();
  Index since_best = 0;
  SgdState state({cfg.lr, cfg.momentum, cfg.weight_decay}, params.values().size());
  const Index batch = std::min(cfg.batch_size, n);

  log.stop_reason = StopReason::kMaxEpochs;
  for (Index epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(std::span<Index>(order));
    double loss_sum = 0.0;
    double active_sum = 0.0;
    for (Index start = 0; start < n; start += batch) {
      const auto rows =
          std::span<const Index>(order).subspan(start, std::min(batch, n - start));
      const auto step = evaluate(rows);
      sgd_step(params.values(), step.grads, state);
      loss_sum += step.loss * static_cast<double>(rows.size());
      active_sum += step.active_fraction() * static_cast<double>(rows.size());
    }
    if (!all_finite(params.values())) {
      fail(ErrorCode::kNumeric, "adapter parameters diverged at epoch " +
                                    std::to_string(epoch));
    }
    const double epoch_loss = loss_sum / static_cast<double>(n);
    log.loss.push_back(epoch_loss);
    log.active_fraction.push_back(active_sum / static_cast<double>(n));
    log.epochs_run = epoch;
    if (observer) observer(epoch, params);

    if (epoch_loss < best_loss) {
      best_loss = epoch_loss;
      best = params;
      log.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      log.stop_reason = StopReason::kPatience;
      break;
    }
  }
  return {std::move(best), std::move(log)};
}

}  // namespace occa
