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

// Pipeline configuration: one UTF-8 key=value file with [section] headers
// drives every stage. Unknown sections and keys are rejected.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "csv_io.hpp"
#include "experiment.hpp"

namespace ppgspoof {

struct PipelinePaths {
  std::string traces_dir = "data/traces";
  std::string ppg_dir = "data/ppg";
  std::string rppg_dir = "data/rppg";
  std::string cycles_dir = "data/cycles";
  std::string models_dir = "models";
  std::string reports_dir = "reports";
};

struct PipelineConfig {
  PipelinePaths paths;
  ExperimentSpec experiment;
  TracePolicy trace;
  std::uint64_t rng_seed = 1;

  /// Pushes rng_seed into the per-module seeds.
  void apply_seed(std::uint64_t seed);
  void validate() const;

  /// Canonical text: every key, fixed order, shortest round-trip numbers.
  std::string to_text() const;
  std::string hash() const;  // hex FNV-1a of to_text()

  /// Relative paths are taken relative to the working directory.
  static PipelineConfig parse(std::string_view text, std::string_view source = "<config>");
  static PipelineConfig load(const std::filesystem::path& path);
};

}  // namespace ppgspoof
