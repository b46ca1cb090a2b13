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

// File-level pipeline stages shared by the command-line tool and the C API.
// Stage ordering is enforced by artifact presence: a missing upstream file
// raises kDependency naming it.

#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "config.hpp"

namespace ppgspoof {

using LogFn = std::function<void(std::string_view)>;

struct StageResult {
  std::vector<std::filesystem::path> written;
  std::vector<std::string> warnings;
  std::vector<std::string> failures;  // per-file errors; the stage continued
  std::string summary;
};

/// Synthetic cohort: traces_dir/<id>.csv and ppg_dir/<id>.csv.
StageResult stage_synth(const PipelineConfig& cfg, const LogFn& log = {});

/// Trace CSVs -> band-passed rPPG waveform CSVs in `out_dir` (same stem).
/// Empty `inputs` means every trace in traces_dir.
StageResult stage_extract(const PipelineConfig& cfg,
                          std::vector<std::filesystem::path> inputs,
                          const std::filesystem::path& out_dir, const LogFn& log = {});

/// Waveform CSVs -> one cycle archive; subject ids come from file stems.
StageResult stage_segment(const PipelineConfig& cfg,
                          std::vector<std::filesystem::path> inputs,
                          const std::filesystem::path& out_archive,
                          std::string_view label = "RPPG", const LogFn& log = {});

/// Trains restoration models (all folds, or one) into `models_dir`.
StageResult stage_train_restore(const PipelineConfig& cfg,
                                const std::filesystem::path& models_dir,
                                std::optional<int> only_fold = {},
                                const LogFn& log = {});

/// Restores archived cycles. Without an explicit model each subject uses
/// the fold model that excluded it. `mean` averages each subject's cycles
/// into one restored cycle.
StageResult stage_restore(const PipelineConfig& cfg,
                          const std::filesystem::path& in_archive,
                          const std::filesystem::path& out_archive,
                          const std::optional<std::filesystem::path>& model,
                          bool mean, const LogFn& log = {});

/// Trains and calibrates one authenticator per subject (or one subject).
StageResult stage_train_auth(const PipelineConfig& cfg,
                             const std::filesystem::path& models_dir,
                             std::optional<std::string> only_subject = {},
                             const LogFn& log = {});

/// Scores archived cycles against each subject's authenticator (or an
/// explicit one) and writes a decision log.
StageResult stage_attack(const PipelineConfig& cfg,
                         const std::filesystem::path& in_archive,
                         const std::filesystem::path& out_log,
                         const std::optional<std::filesystem::path>& auth_model,
                         bool mean, const LogFn& log = {});

/// Full protocol; trains and stores any missing models, then writes the
/// report bundle into `out_dir`.
StageResult stage_report(const PipelineConfig& cfg,
                         const std::filesystem::path& models_dir,
                         const std::filesystem::path& out_dir, const LogFn& log = {});

/// Subject ids with a reference PPG file, sorted.
std::vector<std::string> list_subjects(const PipelineConfig& cfg);

std::filesystem::path sigr_model_path(const std::filesystem::path& models_dir, int fold);
std::filesystem::path auth_model_path(const std::filesystem::path& models_dir,
                                      std::string_view subject_id);

}  // namespace ppgspoof
