// Copyright 2026 The ppgspoof Authors.
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

// Byte-level helpers shared by the model containers and text formats.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ppgspoof {

// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);
double parse_double(std::string_view text, std::string_view what);
long long parse_int(std::string_view text, std::string_view what);

std::string_view trim(std::string_view s) noexcept;

/// Little-endian append-only byte sink.
class ByteWriter {
 public:
  void raw(std::string_view bytes) { buf_.append(bytes); }
  void u64(std::uint64_t v);
  void f64(double v);
  void f64s(std::span<const double> v) {
    for (double x : v) f64(x);
  }
  const std::string& bytes() const noexcept { return buf_; }

 private:
  std::string buf_;
};

/// Bounds-checked little-endian reader; overruns raise kParse.
class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : data_(bytes) {}
  std::string_view raw(std::size_t n);
  std::uint64_t u64();
  double f64();
  void f64s(std::span<double> out) {
    for (double& x : out) x = f64();
  }
  std::string_view rest() const noexcept { return data_.substr(pos_); }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

std::string read_file(const std::filesystem::path& path);
// Writes via a temporary sibling and rename; raises kIo on failure.
void write_file(const std::filesystem::path& path, std::string_view bytes);

/// `key=value` lines; blank lines and lines starting with '#' are skipped.
std::vector<std::pair<std::string, std::string>> parse_key_value_lines(
    std::string_view text);

std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t seed = 0xcbf29ce484222325ULL) noexcept;
std::string hex64(std::uint64_t v);

}  // namespace ppgspoof
