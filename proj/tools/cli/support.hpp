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

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "occa/occa.h"

namespace occa_cli {

using nlohmann::ordered_json;

// Process exit codes; see the README for the table.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitIo = 3,
  kExitFormat = 4,
  kExitNumeric = 5,
  kExitSingleClass = 6,
  kExitCenterSampling = 7,
};

int exit_code_for(occa_status status);

// A failed library call, carrying the status for exit-code mapping.
class StatusError : public std::runtime_error {
 public:
  StatusError(occa_status status, const std::string& message)
      : std::runtime_error(message), status_(status) {}
  occa_status status() const noexcept { return status_; }

 private:
  occa_status status_;
};

// Throws StatusError with occa_last_error() when `status` is not OCCA_OK.
void check(occa_status status);
[[noreturn]] void fail(occa_status status, const std::string& message);

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const noexcept { Free(p); }
};
using Features = std::unique_ptr<occa_features, Deleter<occa_features, occa_features_free>>;
using Adapter = std::unique_ptr<occa_adapter, Deleter<occa_adapter, occa_adapter_free>>;
using Plan = std::unique_ptr<occa_plan, Deleter<occa_plan, occa_plan_free>>;
using TrainLog = std::unique_ptr<occa_train_log, Deleter<occa_train_log, occa_train_log_free>>;

Features load_features(const std::string& path);
Features apply(const occa_adapter* adapter, const occa_features* in);
std::vector<double> score(const occa_features* train, const occa_features* test,
                          std::size_t k_star, bool normalize);
std::vector<std::int32_t> labels_of(const occa_features* fm);

// Shortest round-trip text form of a double.
std::string format_double(double v);

void write_text_atomic(const std::string& path, std::string_view text);
std::string sha256_file(const std::string& path);

// Reads `--config` files: a JSON object (either a run manifest, whose
// "config" member is used, or a flat object) or key=value lines. Items are
// routed to whichever subcommand of `root` was invoked.
class ConfigReader : public CLI::ConfigINI {
 public:
  explicit ConfigReader(const CLI::App* root) : root_(root) {}
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;

 private:
  const CLI::App* root_;
};

// Declares the flags of one subcommand and remembers how to serialize each
// resolved value into the manifest.
class FlagSet {
 public:
  explicit FlagSet(CLI::App* app) : app_(app) {}

  template <typename T>
  CLI::Option* add(const std::string& name, T& value, const std::string& help) {
    auto* opt = app_->add_option("--" + name, value, help)->capture_default_str();
    writers_.emplace_back(name, [&value] { return ordered_json(value); });
    return opt;
  }
  CLI::Option* flag(const std::string& name, bool& value, const std::string& help);

  CLI::App* app() const noexcept { return app_; }
  ordered_json resolved() const;

 private:
  CLI::App* app_;
  std::vector<std::pair<std::string, std::function<ordered_json()>>> writers_;
};

// Run metadata written next to every output.
class Manifest {
 public:
  explicit Manifest(std::string command);

  void set_config(ordered_json config) { config_ = std::move(config); }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void add_input(const std::string& role, const std::string& path);
  void add_output(const std::string& role, const std::string& path);
  ordered_json& result() { return result_; }

  // Hashes every output and writes the manifest atomically to `path`.
  void write(const std::string& path) const;

 private:
  std::string command_;
  std::chrono::steady_clock::time_point start_;
  ordered_json config_ = ordered_json::object();
  std::uint64_t seed_ = 0;
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::vector<std::pair<std::string, std::string>> outputs_;
  ordered_json result_ = ordered_json::object();
};

}  // namespace occa_cli
