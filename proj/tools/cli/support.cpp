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


#include "cli/support.hpp"

#include <openssl/evp.h>

#include <array>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <system_error>

namespace occa_cli {

int exit_code_for(occa_status status) {
  switch (status) {
    case OCCA_OK: return kExitOk;
    case OCCA_ERR_CONFIG:
    case OCCA_ERR_K_TOO_LARGE:
    case OCCA_ERR_INVALID_ARGUMENT: return kExitUsage;
    case OCCA_ERR_IO: return kExitIo;
    case OCCA_ERR_FORMAT:
    case OCCA_ERR_SHAPE_MISMATCH: return kExitFormat;
    case OCCA_ERR_DEGENERATE_VECTOR:
    case OCCA_ERR_NUMERIC: return kExitNumeric;
    case OCCA_ERR_SINGLE_CLASS: return kExitSingleClass;
    case OCCA_ERR_CENTER_SAMPLING_FAILED: return kExitCenterSampling;
    case OCCA_ERR_INTERNAL: break;
  }
  return kExitInternal;
}

void fail(occa_status status, const std::string& message) { throw StatusError(status, message); }

void check(occa_status status) {
  if (status != OCCA_OK) fail(status, occa_last_error());
}

Features load_features(const std::string& path) {
  occa_features* raw = nullptr;
  check(occa_features_load(path.c_str(), &raw));
  return Features(raw);
}

Features apply(const occa_adapter* adapter, const occa_features* in) {
  occa_features* raw = nullptr;
  check(occa_adapter_apply(adapter, in, &raw));
  return Features(raw);
}

std::vector<double> score(const occa_features* train, const occa_features* test,
                          std::size_t k_star, bool normalize) {
  std::vector<double> out(occa_features_rows(test));
  check(occa_score(train, test, k_star, normalize ? 1 : 0, out.data()));
  return out;
}

std::vector<std::int32_t> labels_of(const occa_features* fm) {
  const std::int32_t* labels = occa_features_labels(fm);
  if (!labels) fail(OCCA_ERR_SINGLE_CLASS, "test file carries no inlier/outlier labels");
  return {labels, labels + occa_features_rows(fm)};
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return {buf.data(), end};
}

void write_text_atomic(const std::string& path, std::string_view text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(OCCA_ERR_IO, "cannot open " + tmp.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) fail(OCCA_ERR_IO, "write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(OCCA_ERR_IO, "cannot rename into " + path);
  }
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(OCCA_ERR_IO, "cannot open " + path + " for hashing");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    fail(OCCA_ERR_INTERNAL, "sha256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[md[i] >> 4];
    hex += kHex[md[i] & 15];
  }
  return hex;
}

namespace {

std::string json_scalar(const ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

std::vector<CLI::ConfigItem> ConfigReader::from_config(std::istream& input) const {
  const auto invoked = root_->get_subcommands();
  if (invoked.empty()) throw CLI::ValidationError("--config", "no command given");
  const std::string command = invoked.front()->get_name();
  auto route = [&command](std::vector<CLI::ConfigItem> items) {
    for (auto& item : items) item.parents.insert(item.parents.begin(), command);
    return items;
  };

  const std::string text((std::istreambuf_iterator<char>(input)), std::istreambuf_iterator<char>());
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos || text[first] != '{') {
    std::istringstream ini(text);
    return route(CLI::ConfigINI::from_config(ini));
  }
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw CLI::ValidationError("--config", e.what());
  }
  if (doc.contains("command") && doc["command"] != command) {
    throw CLI::ValidationError("--config", "manifest was written by '" +
                                             json_scalar(doc["command"]) + "', not '" +
                                             command + "'");
  }
  const ordered_json& config = doc.contains("config") ? doc["config"] : doc;
  if (!config.is_object()) throw CLI::ValidationError("--config", "config must be a JSON object");
  std::vector<CLI::ConfigItem> items;
  for (const auto& [key, value] : config.items()) {
    CLI::ConfigItem item;
    item.name = key;
    if (value.is_array()) {
      for (const auto& v : value) item.inputs.push_back(json_scalar(v));
    } else {
      item.inputs.push_back(json_scalar(value));
    }
    items.push_back(std::move(item));
  }
  return route(std::move(items));
}

CLI::Option* FlagSet::flag(const std::string& name, bool& value, const std::string& help) {
  auto* opt = app_->add_flag("--" + name, value, help);
  writers_.emplace_back(name, [&value] { return ordered_json(value); });
  return opt;
}

ordered_json FlagSet::resolved() const {
  ordered_json out = ordered_json::object();
  for (const auto& [name, write] : writers_) out[name] = write();
  return out;
}

Manifest::Manifest(std::string command)
    : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}

void Manifest::add_input(const std::string& role, const std::string& path) {
  inputs_.emplace_back(role, path);
}

void Manifest::add_output(const std::string& role, const std::string& path) {
  outputs_.emplace_back(role, path);
}

void Manifest::write(const std::string& path) const {
  ordered_json doc;
  doc["tool"] = "occa";
  doc["version"] = occa_version();
  doc["command"] = command_;
  doc["config"] = config_;
  doc["seed"] = seed_;
  auto files = [](const auto& list) {
    ordered_json out = ordered_json::object();
    for (const auto& [role, p] : list) out[role] = {{"path", p}, {"sha256", sha256_file(p)}};
    return out;
  };
  doc["inputs"] = files(inputs_);
  doc["outputs"] = files(outputs_);
  doc["result"] = result_;
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
  doc["duration_seconds"] = elapsed.count();
  write_text_atomic(path, doc.dump(2) + "\n");
}

}  // namespace occa_cli
