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


// Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "occa/adaptation.hpp"
#include "occa/evaluation.hpp"
#include "occa/features.hpp"
#include "occa/neighborhood.hpp"
#include "occa/scoring.hpp"
#include "support/cli_runner.hpp"
#include "support/gradient_oracle.hpp"
#include "support/test_support.hpp"

namespace {

using namespace occa;
using testing::read_text;
using testing::run_cli;
using testing::TempDir;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

// Reference multi-class geometry: 16 inlier classes, 4 outlier classes,
// heteroscedastic noise. Baseline AUROC lands near 0.77.
SyntheticSpec multi_class_spec() {
  SyntheticSpec s;
  s.dim = 64;
  s.inlier_classes = 16;
  s.per_class = 100;
  s.test_per_class = 50;
  s.noise_sigma = 0.15;
  s.outlier_classes = 4;
  s.per_outlier_class = 100;
  s.max_center_cosine = 0.5;
  s.noise_spread = 0.5;
  s.seed = 1;
  return s;
}

// One inlier class with an outlier class centered at cosine 0.7 to it, so
// the two clouds overlap.
SyntheticSpec single_class_spec() {
  SyntheticSpec s;
  s.dim = 64;
  s.inlier_classes = 1;
  s.per_class = 500;
  s.test_per_class = 200;
  s.noise_sigma = 0.15;
  s.outlier_classes = 1;
  s.per_outlier_class = 200;
  s.max_center_cosine = 0.5;
  s.outlier_anchor_cosine = 0.7;
  s.seed = 1;
  return s;
}

TrainConfig multi_class_config() {
  TrainConfig c;
  c.lr = 0.1;
  c.max_epochs = 200;
  c.patience = 10;
  return c;
}

struct Data {
  FeatureMatrix train;
  FeatureMatrix test;

  double auroc_of(const Matrix& tr, const Matrix& te) const {
    return auroc(occ_score(tr, te, 2).scores, *test.labels);
  }
  double baseline() const { return auroc_of(train.data, test.data); }
  double adapted(const AdapterParams& p) const {
    return auroc_of(adapt_features(p, train.data), adapt_features(p, test.data));
  }
};

Data make_data(const SyntheticSpec& spec) {
  auto [train, test] = gen_synthetic(spec);
  return {std::move(train), std::move(test)};
}

// --- criteria ---------------------------------------------------------------

Outcome gradient_correctness() {
  double worst = 0.0;
  int checked = 0;
  bool weights_ok = true;
  for (const auto objective : {Objective::kCa2, Objective::kCenter}) {
    int done = 0;
    for (std::uint64_t seed = 1; done < 100; ++seed) {
      const auto r = testing::gradient_check_instance(seed + 100000, objective);
      if (!r) continue;
      ++done;
      worst = std::max(worst, r->relative_error);
      weights_ok = weights_ok && r->weights_agree;
    }
    checked += done;
  }
  return {worst <= 1e-4 && weights_ok,
          std::to_string(checked) + " instances, worst relative error " +
              std::to_string(worst)};
}

Outcome knn_and_auroc_oracles() {
  std::mt19937_64 gen(2024);
  int knn_ok = 0;
  for (int t = 0; t < 50; ++t) {
    const Index n = std::uniform_int_distribution<Index>(2, 500)(gen);
    const Index d = std::uniform_int_distribution<Index>(2, 32)(gen);
    const Index k = std::uniform_int_distribution<Index>(1, std::min<Index>(10, n - 1))(gen);
    // Quantized values force exact distance ties on some matrices.
    Matrix m = testing::random_matrix(n, d, gen());
    if (t % 3 == 0) {
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j) m(i, j) = std::round(m(i, j) * 2.0f);
    }
    bool all = true;
    for (Index q = 0; q < n && all; ++q) {
      const auto got = knn_query(m, q, k);
      const auto want = testing::oracle_knn(m, m, q, k, true);
      for (Index i = 0; i < k; ++i) all = all && got[i].id == want[i];
    }
    knn_ok += all;
  }
  int auroc_ok = 0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 400)(gen);
    std::vector<double> scores(n);
    std::vector<std::int32_t> labels(n);
    std::uniform_int_distribution<int> coarse(0, 20);
    std::normal_distribution<double> fine;
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = t % 2 ? coarse(gen) : fine(gen);
      labels[i] = static_cast<std::int32_t>(i % 2 ? gen() % 2 : i % 4 == 0);
    }
    labels[0] = 0;
    labels[1] = 1;
    auroc_ok += auroc(scores, labels) == testing::oracle_auroc(scores, labels);
  }
  return {knn_ok == 50 && auroc_ok == 50,
          "knn " + std::to_string(knn_ok) + "/50 matrices, auroc " + std::to_string(auroc_ok) +
              "/50 score sets"};
}

Outcome metric_spot_checks() {
  const double a = auroc(std::vector<double>{1, 1, 2}, std::vector<std::int32_t>{0, 1, 1});
  std::vector<double> s;
  std::vector<std::int32_t> l;
  for (int i = 1; i <= 20; ++i) {
    s.push_back(i);
    l.push_back(0);
  }
  s.insert(s.end(), {18.5, 25});
  l.insert(l.end(), {1, 1});
  const auto f = fpr_at_95tpr(s, l);
  return {a == 0.75 && f.fpr == 0.5 && f.threshold == 19.0,
          "auroc " + fmt(a, 2) + ", fpr " + fmt(f.fpr, 2) + " at threshold " + fmt(f.threshold, 1)};
}

Outcome identity_start() {
  const auto data = make_data(multi_class_spec());
  const auto fresh = AdapterParams::identity(Architecture::kResidualMlp, 64, 0, derive_seed(0, 0));
  const auto raw = occ_score(data.train.data, data.test.data, 2).scores;
  const auto adapted =
      occ_score(adapt_features(fresh, data.train.data), adapt_features(fresh, data.test.data), 2).scores;
  const bool library_ok = raw == adapted;

  TempDir dir("accept-identity");
  save_features(data.train, dir / "train.occf", FileFormat::kBinary);
  save_features(data.test, dir / "test.occf", FileFormat::kBinary);
  save_adapter(AdapterParams::identity(Architecture::kLinear, 64, 0, 0), dir / "linear.ocad");
  save_adapter(fresh, dir / "mlp.ocad");
  const std::string common = "eval --train train.occf --test test.occf --scores-format binary ";
  const bool cli_ok =
      run_cli(dir.path(), common + "--scores-out none.occf --out a.csv").code == 0 &&
      run_cli(dir.path(), common + "--adapter linear.ocad --scores-out lin.occf --out b.csv").code == 0 &&
      run_cli(dir.path(), common + "--adapter mlp.ocad --scores-out mlp.occf --out c.csv").code == 0 &&
      read_text(dir / "none.occf") == read_text(dir / "lin.occf") &&
      read_text(dir / "none.occf") == read_text(dir / "mlp.occf");
  return {library_ok && cli_ok, std::string("library ") + (library_ok ? "identical" : "differs") +
                                    ", cli " + (cli_ok ? "identical" : "differs")};
}

Outcome multi_class_trend() {
  const auto data = make_data(multi_class_spec());
  const double base = data.baseline();
  const auto ca2 = train(data.train.data, multi_class_config());
  TrainConfig cc = multi_class_config();
  cc.objective = Objective::kCenter;
  cc.max_epochs = 500;
  const auto center = train(data.train.data, cc);
  const double a_ca2 = data.adapted(ca2.params);
  const double a_center = data.adapted(center.params);
  const bool converged = center.log.stop_reason == StopReason::kPatience;
  const bool pass = base >= 0.7 && base <= 0.9 && a_ca2 - base >= 0.02 &&
                    base - a_center >= 0.02 && converged;
  return {pass, "baseline " + fmt(base) + ", ca2 " + fmt(a_ca2) + ", center " + fmt(a_center) +
                    " (center stopped at epoch " + std::to_string(center.log.epochs_run) + ", " +
                    stop_reason_name(center.log.stop_reason) + ")"};
}

Outcome single_class_trend() {
  const auto data = make_data(single_class_spec());
  const double base = data.baseline();
  TrainConfig c;
  c.lr = 0.01;
  c.max_epochs = 300;
  const double a_ca2 = data.adapted(train(data.train.data, c).params);
  c.objective = Objective::kCenter;
  const double a_center = data.adapted(train(data.train.data, c).params);
  const bool pass = a_ca2 > base && a_center > base && std::abs(a_ca2 - a_center) <= 0.03;
  return {pass, "baseline " + fmt(base) + ", ca2 " + fmt(a_ca2) + ", center " + fmt(a_center)};
}

Outcome beta_ablation_shape() {
  const auto data = make_data(multi_class_spec());
  std::vector<double> aurocs;
  std::string detail;
  for (const double beta : {0.0, 0.3, 0.6, 0.9}) {
    TrainConfig c = multi_class_config();
    c.beta = beta;
    aurocs.push_back(data.adapted(train(data.train.data, c).params));
    detail += (detail.empty() ? "" : " / ") + fmt(aurocs.back());
  }
  const double interior = std::max(aurocs[1], aurocs[2]);
  return {aurocs[0] < interior && aurocs[3] < interior,
          "auroc at beta 0 / 0.3 / 0.6 / 0.9: " + detail};
}

Outcome weight_monotonicity() {
  const auto data = make_data(multi_class_spec());
  const Matrix& x = data.train.data;
  std::vector<Index> rows(x.rows());
  for (Index i = 0; i < x.rows(); ++i) rows[i] = i;

  // Two fixed feature maps: the identity and a perturbed residual adapter.
  auto perturbed = AdapterParams::identity(Architecture::kResidualMlp, x.cols(), 16, 7);
  {
    std::mt19937_64 gen(11);
    std::normal_distribution<double> noise(0.0, 0.05);
    auto values = perturbed.values();
    std::vector<float> v(values.begin(), values.end());
    for (auto& p : v) p += static_cast<float>(noise(gen));
    perturbed = AdapterParams(Architecture::kResidualMlp, x.cols(), 16, std::move(v));
  }
  const std::vector<AdapterParams> maps{
      AdapterParams::identity(Architecture::kLinear, x.cols(), 0, 0), perturbed};

  bool subset = true;
  bool monotone = true;
  std::string detail;
  const auto base_plan = build_plan(x, 5, 0.0);
  for (const auto& params : maps) {
    std::vector<std::vector<std::uint8_t>> weights;
    std::string fractions;
    for (const double beta : {0.0, 0.3, 0.6, 0.9}) {
      NeighborPlan plan = base_plan;
      plan.beta = beta;
      plan.sigma = dynamic_threshold(plan.tau, beta);
      weights.push_back(ca2_loss_and_grad(params, rows, x, plan).weights);
      double active = 0.0;
      for (auto w : weights.back()) active += w;
      fractions += (fractions.empty() ? "" : "/") + fmt(active / rows.size(), 3);
    }
    for (std::size_t b = 1; b < weights.size(); ++b) {
      for (Index i = 0; i < rows.size(); ++i) {
        if (weights[b][i] > weights[b - 1][i]) monotone = false;
        if (b == 2 && weights[2][i] && !weights[1][i]) subset = false;
      }
    }
    detail += (detail.empty() ? "" : "; ") + std::string("active fractions ") + fractions;
  }
  return {subset && monotone, detail};
}

Outcome forgetting_resistance() {
  const auto data = make_data(multi_class_spec());
  struct Trace {
    double peak = 0.0;
    double last = 0.0;
    Index peak_epoch = 0;
  };
  auto trace_of = [&](Objective objective) {
    TrainConfig c = multi_class_config();
    c.objective = objective;
    c.patience = c.max_epochs;  // run the full horizon
    Trace t;
    train(data.train.data, c, [&](Index epoch, const AdapterParams& p) {
      const double a = data.adapted(p);
      if (a > t.peak) {
        t.peak = a;
        t.peak_epoch = epoch;
      }
      if (epoch == c.max_epochs) t.last = a;
    });
    return t;
  };
  const Trace ca2 = trace_of(Objective::kCa2);
  const Trace center = trace_of(Objective::kCenter);
  const double ca2_drop = ca2.peak - ca2.last;
  const double center_drop = center.peak - center.last;
  return {ca2_drop < center_drop,
          "drop from peak to epoch 200: ca2 " + fmt(ca2_drop) + " (peak " + fmt(ca2.peak) + " at " +
              std::to_string(ca2.peak_epoch) + "), center " + fmt(center_drop) + " (peak " +
              fmt(center.peak) + " at " + std::to_string(center.peak_epoch) + ")"};
}

Outcome default_hyperparameters() {
  TempDir dir("accept-defaults");
  if (run_cli(dir.path(), "gen --classes 1 --dim 8 --per-class 20").code != 0 ||
      run_cli(dir.path(), "adapt --train train.occf").code != 0) {
    return {false, "cli run failed"};
  }
  const auto c = nlohmann::json::parse(read_text(dir / "adapter.ocad.manifest.json"))["config"];
  const bool pass = c["lr"] == 3e-4 && c["momentum"] == 0.9 && c["weight-decay"] == 1e-3 &&
                    c["batch-size"] == 512 && c["k"] == 5 && c["k-star"] == 2 && c["beta"] == 0.3;
  return {pass, "lr " + c["lr"].dump() + ", momentum " + c["momentum"].dump() + ", weight decay " +
                    c["weight-decay"].dump() + ", batch " + c["batch-size"].dump() + ", k " +
                    c["k"].dump() + ", k* " + c["k-star"].dump() + ", beta " + c["beta"].dump()};
}

Outcome determinism() {
  TempDir dir("accept-determinism");
  const std::vector<std::string> runs{
      "gen --classes 3 --dim 16 --per-class 40 --test-per-class 20 --per-outlier-class 20 --seed 9",
      "adapt --train train.occf --lr 0.05 --max-epochs 10 --trace-test test.occf --plan-out plan.ocnp",
      "eval --train train.occf --test test.occf --adapter adapter.ocad --scores-out scores.csv",
      "sweep --class-counts 1,4 --dim 16 --per-class 20 --test-per-class 10 --per-outlier-class 10 "
      "--max-epochs 5 --lr 0.05 --out-dir sweep"};
  const std::vector<std::pair<std::string, std::string>> manifests{
      {"gen", "train.occf.manifest.json"},
      {"adapt", "adapter.ocad.manifest.json"},
      {"eval", "report.csv.manifest.json"},
      {"sweep", "sweep/sweep.manifest.json"}};
  for (const auto& r : runs) {
    if (run_cli(dir.path(), r).code != 0) return {false, "initial run failed: " + r};
  }
  int identical = 0;
  int outputs = 0;
  for (const auto& [command, path] : manifests) {
    const auto before = nlohmann::json::parse(read_text(dir / path));
    std::ofstream(dir / "replay.json") << before.dump();
    std::vector<std::pair<std::string, std::string>> originals;
    for (const auto& [role, entry] : before["outputs"].items()) {
      const auto p = entry["path"].get<std::string>();
      originals.emplace_back(p, read_text(dir / p));
      std::filesystem::remove(dir / p);
    }
    if (run_cli(dir.path(), command + " --config replay.json").code != 0) {
      return {false, "replay failed: " + command};
    }
    for (const auto& [p, bytes] : originals) {
      ++outputs;
      identical += read_text(dir / p) == bytes;
    }
  }
  return {identical == outputs && outputs > 0,
          std::to_string(identical) + "/" + std::to_string(outputs) +
              " outputs byte-identical across gen, adapt, eval and sweep replays"};
}

struct Criterion {
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"gradient-correctness", 10, gradient_correctness},
      {"knn-and-auroc-oracles", 30, knn_and_auroc_oracles},
      {"metric-spot-checks", 0, metric_spot_checks},
      {"identity-start-equality", 0, identity_start},
      {"multi-class-trend", 300, multi_class_trend},
      {"single-class-trend", 120, single_class_trend},
      {"beta-ablation-shape", 0, beta_ablation_shape},
      {"weight-monotonicity", 0, weight_monotonicity},
      {"forgetting-resistance", 0, forgetting_resistance},
      {"default-hyperparameters", 0, default_hyperparameters},
      {"determinism", 0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = fmt(seconds, 1) + " s";
    if (c.limit_seconds > 0) {
      timing += " of " + fmt(c.limit_seconds, 0) + " s";
      if (seconds > c.limit_seconds) {
        o.pass = false;
        o.detail += "; over time limit";
      }
    }
    failed += !o.pass;
    std::printf("%s %s: %s [%s]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(),
                timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
