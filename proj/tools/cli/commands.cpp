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


#include "cli/commands.hpp"

#include <cstdint>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cli/support.hpp"

namespace occa_cli {
namespace {

// `--config` belongs to the root app, which is the only level CLI11 reads
// config files at; subcommands fall through to it.
void attach_config(CLI::App* app) {
  app->fallthrough();
  app->footer("--config <file> reads options from key=value lines or a JSON run manifest.");
}

void add_spec_flags(FlagSet& flags, occa_synthetic_spec& spec, bool with_classes) {
  flags.add("dim", spec.dim, "Feature dimension");
  if (with_classes) flags.add("classes", spec.inlier_classes, "Number of one-class classes");
  flags.add("per-class", spec.per_class, "Training rows per class");
  flags.add("test-per-class", spec.test_per_class, "Held-out inlier test rows per class");
  flags.add("noise-sigma", spec.noise_sigma, "Within-class Gaussian noise scale");
  flags.add("outlier-classes", spec.outlier_classes, "Number of outlier classes");
  flags.add("per-outlier-class", spec.per_outlier_class, "Test rows per outlier class");
  flags.add("max-center-cosine", spec.max_center_cosine,
            "Largest allowed cosine between two class centers");
  flags.add("noise-spread", spec.noise_spread,
            "Log-normal spread of the per-row noise scale (0: homoscedastic)");
  flags.add("outlier-anchor-cosine", spec.outlier_anchor_cosine,
            "Place each outlier center at this cosine to an inlier center (0: off)");
}

struct TrainFlags {
  occa_train_config cfg{};
  std::string objective;
  std::string arch;

  TrainFlags() {
    occa_train_config_default(&cfg);
    objective = occa_objective_name(cfg.objective);
    arch = occa_architecture_name(cfg.arch);
  }

  void add(FlagSet& flags, bool with_objective) {
    if (with_objective) {
      flags.add("objective", objective, "Adaptation objective")
          ->check(CLI::IsMember({"ca2", "center"}));
    }
    flags.add("arch", arch, "Adapter architecture")
        ->check(CLI::IsMember({"residual-mlp", "linear"}));
    flags.add("hidden", cfg.hidden, "Hidden width of the residual MLP (0: feature dimension)");
    flags.add("k", cfg.k, "Neighbors that define each training target");
    flags.add("k-star", cfg.k_star, "Neighbors used by the outlier score");
    flags.add("beta", cfg.beta, "Hard-weight threshold interpolation in [0, 1]");
    flags.add("lr", cfg.lr, "SGD learning rate");
    flags.add("momentum", cfg.momentum, "SGD momentum");
    flags.add("weight-decay", cfg.weight_decay, "L2 weight decay");
    flags.add("batch-size", cfg.batch_size, "Mini-batch size");
    flags.add("patience", cfg.patience, "Epochs without loss improvement before stopping");
    flags.add("max-epochs", cfg.max_epochs, "Epoch budget");
  }

  occa_train_config resolve() const {
    occa_train_config out = cfg;
    check(occa_objective_parse(objective.c_str(), &out.objective));
    check(occa_architecture_parse(arch.c_str(), &out.arch));
    return out;
  }
};

occa_eval_report evaluate(const std::vector<double>& scores,
                          const std::vector<std::int32_t>& labels) {
  occa_eval_report report{};
  check(occa_evaluate(scores.data(), labels.data(), scores.size(), &report));
  return report;
}

std::string format_report(const occa_eval_report& report, bool pretty) {
  const std::size_t n = occa_eval_report_format(&report, pretty ? 1 : 0, nullptr, 0);
  std::string out(n + 1, '\0');
  occa_eval_report_format(&report, pretty ? 1 : 0, out.data(), out.size());
  out.resize(n);
  return out;
}

ordered_json report_json(const occa_eval_report& r) {
  return {{"auroc", r.auroc},           {"tpr95fpr", r.tpr95fpr},
          {"n_inliers", r.n_inliers},   {"n_outliers", r.n_outliers},
          {"threshold", r.threshold}};
}

// Per-epoch AUROC of the current adapter, collected from the training
// callback. Errors are parked here because they must not unwind through the
// C boundary.
struct TraceContext {
  const occa_features* train = nullptr;
  const occa_features* test = nullptr;
  std::vector<std::int32_t> labels;
  std::size_t k_star = 2;
  bool normalize = false;
  std::vector<std::pair<std::size_t, double>> points;
  std::optional<StatusError> error;
};

void trace_epoch(void* user, std::size_t epoch, const occa_adapter* adapter) {
  auto* ctx = static_cast<TraceContext*>(user);
  if (ctx->error) return;
  try {
    const Features train = apply(adapter, ctx->train);
    const Features test = apply(adapter, ctx->test);
    const auto scores = score(train.get(), test.get(), ctx->k_star, ctx->normalize);
    double auc = 0.0;
    check(occa_auroc(scores.data(), ctx->labels.data(), scores.size(), &auc));
    ctx->points.emplace_back(epoch, auc);
  } catch (const StatusError& e) {
    ctx->error = e;
  }
}

struct TrainOutcome {
  Adapter adapter;
  TrainLog log;
};

TrainOutcome run_training(const occa_features* train, const occa_train_config& cfg,
                          TraceContext* trace) {
  occa_adapter* adapter = nullptr;
  occa_train_log* log = nullptr;
  check(occa_train(train, &cfg, trace ? trace_epoch : nullptr, trace, &adapter, &log));
  TrainOutcome out{Adapter(adapter), TrainLog(log)};
  if (trace && trace->error) throw *trace->error;
  return out;
}

// ---- gen

struct GenOptions {
  occa_synthetic_spec spec{};
  std::string train_out = "train.occf";
  std::string test_out = "test.occf";
  std::string format = "binary";
  std::string manifest;
};

void run_gen(const GenOptions& o, const FlagSet& flags) {
  Manifest manifest("gen");
  manifest.set_config(flags.resolved());
  manifest.set_seed(o.spec.seed);

  occa_features* train_raw = nullptr;
  occa_features* test_raw = nullptr;
  check(occa_generate(&o.spec, &train_raw, &test_raw));
  const Features train(train_raw);
  const Features test(test_raw);
  const occa_format format = o.format == "csv" ? OCCA_FORMAT_CSV : OCCA_FORMAT_BINARY;
  check(occa_features_save(train.get(), o.train_out.c_str(), format));
  check(occa_features_save(test.get(), o.test_out.c_str(), format));

  manifest.add_output("train", o.train_out);
  manifest.add_output("test", o.test_out);
  manifest.result() = {{"train_rows", occa_features_rows(train.get())},
                       {"test_rows", occa_features_rows(test.get())},
                       {"dim", occa_features_dim(train.get())}};
  const std::string path = o.manifest.empty() ? o.train_out + ".manifest.json" : o.manifest;
  manifest.write(path);
  std::cout << "wrote " << o.train_out << " (" << occa_features_rows(train.get()) << " rows) and "
            << o.test_out << " (" << occa_features_rows(test.get()) << " rows), d = "
            << occa_features_dim(train.get()) << "\n";
}

Command add_gen(CLI::App& root) {
  auto* app = root.add_subcommand("gen", "Generate a synthetic train/test feature pair");
  auto o = std::make_shared<GenOptions>();
  occa_synthetic_spec_default(&o->spec);
  auto flags = std::make_shared<FlagSet>(app);
  add_spec_flags(*flags, o->spec, true);
  flags->add("seed", o->spec.seed, "Random seed");
  flags->add("train-out", o->train_out, "Training feature file");
  flags->add("test-out", o->test_out, "Test feature file (labels 0 = inlier, 1 = outlier)");
  flags->add("format", o->format, "Output format")->check(CLI::IsMember({"binary", "csv"}));
  app->add_option("--manifest", o->manifest, "Manifest path (default: <train-out>.manifest.json)");
  attach_config(app);
  return {app, [o, flags] { run_gen(*o, *flags); }};
}

// ---- adapt

struct AdaptOptions {
  std::string train;
  std::string out = "adapter.ocad";
  std::string log;
  std::string plan_out;
  std::string trace_test;
  std::string trace_out;
  bool normalize = false;
  std::uint64_t seed = 0;
  TrainFlags train_flags;
  std::string manifest;
};

void run_adapt(AdaptOptions& o, const FlagSet& flags) {
  if (o.log.empty()) o.log = o.out + ".log.csv";
  if (!o.trace_test.empty() && o.trace_out.empty()) o.trace_out = o.out + ".trace.csv";
  occa_train_config cfg = o.train_flags.resolve();
  cfg.seed = o.seed;

  Manifest manifest("adapt");
  manifest.set_config(flags.resolved());
  manifest.set_seed(o.seed);

  const Features train = load_features(o.train);
  manifest.add_input("train", o.train);

  Features test;
  std::optional<TraceContext> trace;
  if (!o.trace_test.empty()) {
    test = load_features(o.trace_test);
    manifest.add_input("trace_test", o.trace_test);
    trace.emplace();
    trace->train = train.get();
    trace->test = test.get();
    trace->labels = labels_of(test.get());
    trace->k_star = cfg.k_star;
    trace->normalize = o.normalize;
  }

  const TrainOutcome result = run_training(train.get(), cfg, trace ? &*trace : nullptr);
  check(occa_adapter_save(result.adapter.get(), o.out.c_str()));
  manifest.add_output("adapter", o.out);

  const occa_train_log* log = result.log.get();
  const std::size_t n = occa_train_log_size(log);
  const double* loss = occa_train_log_loss(log);
  const double* active = occa_train_log_active_fraction(log);
  std::ostringstream csv;
  csv << "epoch,loss,active_fraction\n";
  for (std::size_t e = 0; e < n; ++e)
    csv << e << ',' << format_double(loss[e]) << ',' << format_double(active[e]) << '\n';
  write_text_atomic(o.log, csv.str());
  manifest.add_output("log", o.log);

  if (trace) {
    std::ostringstream t;
    t << "epoch,auroc\n";
    for (const auto& [epoch, auc] : trace->points) t << epoch << ',' << format_double(auc) << '\n';
    write_text_atomic(o.trace_out, t.str());
    manifest.add_output("trace", o.trace_out);
  }
  if (!o.plan_out.empty()) {
    occa_plan* raw = nullptr;
    check(occa_plan_build(train.get(), cfg.k, cfg.beta, &raw));
    const Plan plan(raw);
    check(occa_plan_save(plan.get(), o.plan_out.c_str()));
    manifest.add_output("plan", o.plan_out);
  }

  const occa_stop_reason stop = occa_train_log_stop_reason(log);
  manifest.result() = {
      {"epochs_run", occa_train_log_epochs_run(log)},
      {"best_epoch", occa_train_log_best_epoch(log)},
      {"stop_reason", stop == OCCA_STOP_PATIENCE ? "patience" : "max-epochs"},
      {"initial_loss", loss[0]},
      {"best_loss", loss[occa_train_log_best_epoch(log)]},
      {"final_loss", loss[n - 1]},
      {"tau", occa_train_log_tau(log)},
      {"sigma", occa_train_log_sigma(log)}};
  manifest.write(o.manifest.empty() ? o.out + ".manifest.json" : o.manifest);

  std::cout << "adapter " << o.out << ": " << occa_train_log_epochs_run(log)
            << " epochs, best epoch " << occa_train_log_best_epoch(log) << ", loss "
            << format_double(loss[0]) << " -> " << format_double(loss[occa_train_log_best_epoch(log)])
            << "\n";
}

Command add_adapt(CLI::App& root) {
  auto* app = root.add_subcommand("adapt", "Train a feature adapter on one-class training data");
  auto o = std::make_shared<AdaptOptions>();
  o->seed = o->train_flags.cfg.seed;
  auto flags = std::make_shared<FlagSet>(app);
  flags->add("train", o->train, "Training feature file")->required();
  flags->add("out", o->out, "Adapter output file");
  flags->add("log", o->log, "Per-epoch loss log (default: <out>.log.csv)");
  flags->add("plan-out", o->plan_out, "Also save the frozen neighbor plan here");
  flags->add("trace-test", o->trace_test, "Labelled test file for a per-epoch AUROC trace");
  flags->add("trace-out", o->trace_out, "AUROC trace output (default: <out>.trace.csv)");
  flags->flag("normalize", o->normalize, "L2-normalize features before trace scoring");
  o->train_flags.add(*flags, true);
  flags->add("seed", o->seed, "Random seed");
  app->add_option("--manifest", o->manifest, "Manifest path (default: <out>.manifest.json)");
  attach_config(app);
  return {app, [o, flags] { run_adapt(*o, *flags); }};
}

// ---- eval

struct EvalOptions {
  std::string train;
  std::string test;
  std::string adapter;
  std::size_t k_star = 2;
  bool normalize = false;
  std::string out = "report.csv";
  std::string scores_out;
  std::string scores_format = "csv";
  std::string manifest;
};

void run_eval(const EvalOptions& o, const FlagSet& flags) {
  Manifest manifest("eval");
  manifest.set_config(flags.resolved());

  Features train = load_features(o.train);
  Features test = load_features(o.test);
  manifest.add_input("train", o.train);
  manifest.add_input("test", o.test);
  const auto labels = labels_of(test.get());

  if (!o.adapter.empty()) {
    occa_adapter* raw = nullptr;
    check(occa_adapter_load(o.adapter.c_str(), &raw));
    const Adapter adapter(raw);
    manifest.add_input("adapter", o.adapter);
    train = apply(adapter.get(), train.get());
    test = apply(adapter.get(), test.get());
  }

  const auto scores = score(train.get(), test.get(), o.k_star, o.normalize);
  const occa_eval_report report = evaluate(scores, labels);
  write_text_atomic(o.out, std::string(occa_eval_csv_header()) + "\n" +
                               format_report(report, false) + "\n");
  manifest.add_output("report", o.out);
  if (!o.scores_out.empty()) {
    const occa_format format = o.scores_format == "csv" ? OCCA_FORMAT_CSV : OCCA_FORMAT_BINARY;
    check(occa_scores_save(scores.data(), scores.size(), labels.data(), o.scores_out.c_str(),
                           format));
    manifest.add_output("scores", o.scores_out);
  }
  manifest.result() = report_json(report);
  manifest.write(o.manifest.empty() ? o.out + ".manifest.json" : o.manifest);
  std::cout << format_report(report, true);
}

Command add_eval(CLI::App& root) {
  auto* app = root.add_subcommand("eval", "Score a labelled test file against training data");
  auto o = std::make_shared<EvalOptions>();
  auto flags = std::make_shared<FlagSet>(app);
  flags->add("train", o->train, "Training feature file")->required();
  flags->add("test", o->test, "Test feature file with 0/1 labels")->required();
  flags->add("adapter", o->adapter, "Adapter applied to both files (default: none)");
  flags->add("k-star", o->k_star, "Neighbors used by the outlier score");
  flags->flag("normalize", o->normalize, "L2-normalize both sides before scoring");
  flags->add("out", o->out, "Report CSV");
  flags->add("scores-out", o->scores_out, "Optional per-row score file");
  flags->add("scores-format", o->scores_format, "Score file format")
      ->check(CLI::IsMember({"csv", "binary"}));
  app->add_option("--manifest", o->manifest, "Manifest path (default: <out>.manifest.json)");
  attach_config(app);
  return {app, [o, flags] { run_eval(*o, *flags); }};
}

// ---- sweep

struct SweepOptions {
  occa_synthetic_spec spec{};
  std::vector<std::size_t> class_counts{1, 2, 4, 16};
  std::vector<std::string> objectives{"none", "center", "ca2"};
  TrainFlags train_flags;
  bool normalize = false;
  bool trace = true;
  std::uint64_t seed = 0;
  std::string out_dir = "sweep";
  std::string manifest;
};

struct SweepRow {
  std::size_t class_count = 0;
  std::string objective;
  std::optional<occa_eval_report> before;
  std::optional<occa_eval_report> after;
  std::string status = "ok";
};

std::string metric(const std::optional<occa_eval_report>& r, bool auroc) {
  if (!r) return "";
  return format_double(auroc ? r->auroc : r->tpr95fpr);
}

void run_sweep(const SweepOptions& o, const FlagSet& flags) {
  namespace fs = std::filesystem;
  Manifest manifest("sweep");
  manifest.set_config(flags.resolved());
  manifest.set_seed(o.seed);
  std::error_code ec;
  fs::create_directories(o.out_dir, ec);
  if (ec) fail(OCCA_ERR_IO, "cannot create " + o.out_dir);

  const occa_train_config base_cfg = o.train_flags.resolve();
  std::vector<SweepRow> rows;
  std::ostringstream traces;
  traces << "class_count,objective,epoch,auroc\n";

  auto report_failure = [](SweepRow& row, const StatusError& e) {
    row.status = occa_status_name(e.status());
    std::cerr << "sweep: m = " << row.class_count << ", " << row.objective << ": " << e.what()
              << "\n";
  };

  for (const std::size_t m : o.class_counts) {
    occa_synthetic_spec spec = o.spec;
    spec.inlier_classes = m;
    // Every class count gets its own data stream; objectives share it so
    // that "before" numbers are comparable across rows.
    spec.seed = occa_derive_seed(o.seed, m);

    Features train;
    Features test;
    std::optional<occa_eval_report> before;
    std::vector<std::int32_t> labels;
    std::optional<StatusError> data_error;
    try {
      occa_features* a = nullptr;
      occa_features* b = nullptr;
      check(occa_generate(&spec, &a, &b));
      train.reset(a);
      test.reset(b);
      labels = labels_of(test.get());
      before = evaluate(score(train.get(), test.get(), base_cfg.k_star, o.normalize), labels);
    } catch (const StatusError& e) {
      data_error = e;
    }

    for (std::size_t cell = 0; cell < o.objectives.size(); ++cell) {
      SweepRow row{m, o.objectives[cell], before, std::nullopt, "ok"};
      if (data_error) {
        report_failure(row, *data_error);
        rows.push_back(row);
        continue;
      }
      if (row.objective == "none") {
        row.after = before;
        rows.push_back(row);
        continue;
      }
      try {
        occa_train_config cfg = base_cfg;
        check(occa_objective_parse(row.objective.c_str(), &cfg.objective));
        cfg.seed = occa_derive_seed(spec.seed, 1 + static_cast<std::uint64_t>(cfg.objective));
        std::optional<TraceContext> trace;
        if (o.trace) {
          trace.emplace();
          trace->train = train.get();
          trace->test = test.get();
          trace->labels = labels;
          trace->k_star = cfg.k_star;
          trace->normalize = o.normalize;
        }
        const TrainOutcome result = run_training(train.get(), cfg, trace ? &*trace : nullptr);
        const Features train_a = apply(result.adapter.get(), train.get());
        const Features test_a = apply(result.adapter.get(), test.get());
        row.after = evaluate(score(train_a.get(), test_a.get(), cfg.k_star, o.normalize), labels);
        if (trace) {
          for (const auto& [epoch, auc] : trace->points)
            traces << m << ',' << row.objective << ',' << epoch << ',' << format_double(auc)
                   << '\n';
        }
      } catch (const StatusError& e) {
        report_failure(row, e);
      }
      rows.push_back(row);
    }
  }

  std::ostringstream csv;
  csv << "class_count,objective,auroc_before,auroc_after,fpr_before,fpr_after,status\n";
  for (const auto& r : rows) {
    csv << r.class_count << ',' << r.objective << ',' << metric(r.before, true) << ','
        << metric(r.after, true) << ',' << metric(r.before, false) << ','
        << metric(r.after, false) << ',' << r.status << '\n';
    std::cout << "m = " << r.class_count << "  " << r.objective << "  auroc "
              << (r.before ? metric(r.before, true) : "-") << " -> "
              << (r.after ? metric(r.after, true) : "-") << "  [" << r.status << "]\n";
  }
  const std::string results_path = (fs::path(o.out_dir) / "results.csv").string();
  write_text_atomic(results_path, csv.str());
  manifest.add_output("results", results_path);
  if (o.trace) {
    const std::string traces_path = (fs::path(o.out_dir) / "traces.csv").string();
    write_text_atomic(traces_path, traces.str());
    manifest.add_output("traces", traces_path);
  }
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.status != "ok";
  manifest.result() = {{"rows", rows.size()}, {"failed_rows", failed}};
  manifest.write(o.manifest.empty() ? (fs::path(o.out_dir) / "sweep.manifest.json").string()
                                    : o.manifest);
}

Command add_sweep(CLI::App& root) {
  auto* app = root.add_subcommand(
      "sweep", "Generate, adapt and evaluate over class counts and objectives");
  auto o = std::make_shared<SweepOptions>();
  occa_synthetic_spec_default(&o->spec);
  o->seed = o->train_flags.cfg.seed;
  auto flags = std::make_shared<FlagSet>(app);
  flags->add("class-counts", o->class_counts, "Numbers of one-class classes to sweep")
      ->delimiter(',');
  flags->add("objectives", o->objectives, "Objectives to run (none = unadapted baseline)")
      ->delimiter(',')
      ->check(CLI::IsMember({"none", "center", "ca2"}));
  add_spec_flags(*flags, o->spec, false);
  o->train_flags.add(*flags, false);
  flags->flag("normalize", o->normalize, "L2-normalize features before scoring");
  flags->add("trace", o->trace, "Record per-epoch AUROC traces");
  flags->add("seed", o->seed, "Base seed; each cell derives its own");
  flags->add("out-dir", o->out_dir, "Directory for results.csv and traces.csv");
  app->add_option("--manifest", o->manifest,
                  "Manifest path (default: <out-dir>/sweep.manifest.json)");
  attach_config(app);
  return {app, [o, flags] { run_sweep(*o, *flags); }};
}

}  // namespace

std::vector<Command> add_commands(CLI::App& root) {
  root.set_config("--config", "", "Read options from key=value lines or a JSON run manifest");
  root.config_formatter(std::make_shared<ConfigReader>(&root));
  return {add_gen(root), add_adapt(root), add_eval(root), add_sweep(root)};
}

}  // namespace occa_cli
