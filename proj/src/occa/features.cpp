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

#include "occa/features.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "occa/binary_io.hpp"
#include "occa/error.hpp"

namespace occa {
namespace {

constexpr std::uint8_t kFlagLabels = 0x1;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

void append_float(std::string& out, float v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

void validate(const FeatureMatrix& fm) {
  if (fm.rows() < 1) fail(ErrorCode::kFormat, "feature matrix has no rows");
  if (fm.dim() < 2) {
    fail(ErrorCode::kFormat, "feature dimension must be >= 2, got " +
                                 std::to_string(fm.dim()));
  }
  if (fm.labels && fm.labels->size() != fm.rows()) {
    fail(ErrorCode::kFormat, "label count " + std::to_string(fm.labels->size()) +
                                 " does not match row count " +
                                 std::to_string(fm.rows()));
  }
  if (!all_finite(fm.data.values())) {
    fail(ErrorCode::kFormat, "feature matrix contains non-finite values");
  }
}

std::string encode_occf(const Matrix& data,
                        const std::vector<std::int32_t>* labels) {
  detail::ByteWriter w;
  w.raw(kOccfMagic);
  w.put<std::uint32_t>(kOccfVersion);
  w.put<std::uint8_t>(labels ? kFlagLabels : 0);
  w.put<std::uint64_t>(data.rows());
  w.put<std::uint64_t>(data.cols());
  w.put_all<float>(data.values());
  if (labels) w.put_all<std::int32_t>(*labels);
  return w.bytes();
}

FeatureMatrix decode_occf(std::string_view bytes, std::size_t* consumed,
                          std::string_view what) {
  detail::ByteReader r(bytes, std::string(what));
  if (r.raw(4) != kOccfMagic) {
    fail(ErrorCode::kFormat, std::string(what) + ": bad magic");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kOccfVersion) {
    fail(ErrorCode::kFormat, std::string(what) + ": unsupported version " +
                                 std::to_string(version));
  }
  const auto flags = r.get<std::uint8_t>();
  if ((flags & ~kFlagLabels) != 0) {
    fail(ErrorCode::kFormat, std::string(what) + ": unknown flag bits");
  }
  const auto n = r.get<std::uint64_t>();
  const auto d = r.get<std::uint64_t>();
  // Reject sizes that cannot fit before allocating anything.
  if (d != 0 && n > r.remaining() / sizeof(float) / d) {
    fail(ErrorCode::kFormat, std::string(what) + ": truncated payload");
  }
  std::vector<float> values(n * d);
  for (auto& v : values) v = r.get<float>();
  if (!all_finite(values)) {
    fail(ErrorCode::kFormat, std::string(what) + ": non-finite value");
  }
  FeatureMatrix fm{Matrix(n, d, std::move(values)), std::nullopt};
  if (flags & kFlagLabels) {
    std::vector<std::int32_t> labels(n);
    for (auto& l : labels) l = r.get<std::int32_t>();
    fm.labels = std::move(labels);
  }
  if (consumed) *consumed = r.position();
  return fm;
}

std::string encode_csv(const FeatureMatrix& fm) {
  std::string out;
  for (Index j = 0; j < fm.dim(); ++j) {
    if (j) out += ',';
    out += 'f' + std::to_string(j);
  }
  if (fm.labels) out += ",label";
  out += '\n';
  for (Index i = 0; i < fm.rows(); ++i) {
    const auto row = fm.data.row(i);
    for (Index j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      append_float(out, row[j]);
    }
    if (fm.labels) out += ',' + std::to_string((*fm.labels)[i]);
    out += '\n';
  }
  return out;
}

FeatureMatrix decode_csv(std::string_view text, std::string_view what) {
  const std::string where(what);
  std::size_t pos = 0;
  auto next_line = [&](std::string_view& line) {
    while (pos < text.size()) {
      auto end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      line = trim(text.substr(pos, end - pos));
      pos = end + 1;
      if (!line.empty()) return true;
    }
    return false;
  };

  std::string_view line;
  if (!next_line(line)) fail(ErrorCode::kFormat, where + ": empty CSV");
  const auto header = split_commas(line);
  bool has_labels = !header.empty() && header.back() == "label";
  const Index d = header.size() - (has_labels ? 1 : 0);
  for (Index j = 0; j < d; ++j) {
    if (header[j] != "f" + std::to_string(j)) {
      fail(ErrorCode::kFormat, where + ": bad header column '" +
                                   std::string(header[j]) + "'");
    }
  }

  std::vector<float> values;
  std::vector<std::int32_t> labels;
  Index n = 0;
  while (next_line(line)) {
    ++n;
    const auto cells = split_commas(line);
    if (cells.size() != header.size()) {
      fail(ErrorCode::kFormat, where + ": row " + std::to_string(n) + " has " +
                                   std::to_string(cells.size()) +
                                   " fields, expected " +
                                   std::to_string(header.size()));
    }
    for (Index j = 0; j < d; ++j) {
      float v = 0.0f;
      const auto cell = cells[j];
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size() ||
          !std::isfinite(v)) {
        fail(ErrorCode::kFormat, where + ": row " + std::to_string(n) +
                                     " has invalid value '" + std::string(cell) +
                                     "'");
      }
      values.push_back(v);
    }
    if (has_labels) {
      std::int32_t l = 0;
      const auto cell = cells.back();
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), l);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        fail(ErrorCode::kFormat, where + ": row " + std::to_string(n) +
                                     " has invalid label '" + std::string(cell) +
                                     "'");
      }
      labels.push_back(l);
    }
  }
  FeatureMatrix fm{Matrix(n, d, std::move(values)), std::nullopt};
  if (has_labels) fm.labels = std::move(labels);
  return fm;
}

void save_features(const FeatureMatrix& fm, const std::filesystem::path& path,
                   FileFormat format) {
  validate(fm);
  const std::string bytes =
      format == FileFormat::kBinary
          ? encode_occf(fm.data, fm.labels ? &*fm.labels : nullptr)
          : encode_csv(fm);
  detail::write_file_atomic(path, bytes);
}

FeatureMatrix load_features(const std::filesystem::path& path) {
  const std::string bytes = detail::read_file(path);
  FeatureMatrix fm;
  if (bytes.starts_with(kOccfMagic)) {
    std::size_t consumed = 0;
    fm = decode_occf(bytes, &consumed, path.string());
    if (consumed != bytes.size()) {
      fail(ErrorCode::kFormat, path.string() + ": trailing bytes after payload");
    }
  } else {
    fm = decode_csv(bytes, path.string());
  }
  validate(fm);
  return fm;
}

}  // namespace occa
