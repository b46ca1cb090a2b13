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

// Text file formats: waveforms, skin-colour traces, cycle archives, feature
// tables and decision logs. Errors carry the file name and line number.

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "auth.hpp"
#include "rppg_extract.hpp"
#include "signal_core.hpp"
#include "waveform_analysis.hpp"

namespace ppgspoof {

// `t_seconds,value`
WaveSignal parse_waveform_csv(std::string_view text, SignalLabel label,
                              std::string_view source = "<memory>");
WaveSignal read_waveform_csv(const std::filesystem::path& path,
                             SignalLabel label = SignalLabel::kPpg);
std::string format_waveform_csv(const WaveSignal& sig);
void write_waveform_csv(const WaveSignal& sig, const std::filesystem::path& path);

/// Gap rows (skin_pixel_count 0 with empty or NaN channels) mark frames
/// without usable skin. Runs of at most `max_gap_frames` are filled by linear
/// interpolation; longer runs, or gaps at either end, reject the trace.
struct TracePolicy {
  int max_gap_frames = 0;
};

struct TraceGapStats {
  std::size_t gap_rows = 0;
  std::size_t longest_run = 0;
};

// `frame_index,t_seconds,r_mean,g_mean,b_mean,skin_pixel_count`
RgbTrace parse_trace_csv(std::string_view text, const TracePolicy& policy = {},
                         std::string_view source = "<memory>",
                         TraceGapStats* stats = nullptr);
RgbTrace read_trace_csv(const std::filesystem::path& path,
                        const TracePolicy& policy = {},
                        TraceGapStats* stats = nullptr);
/// `gaps` marks frames to emit as gap rows (empty channels, count 0).
std::string format_trace_csv(const RgbTrace& trace,
                             std::span<const bool> gaps = {});
void write_trace_csv(const RgbTrace& trace, const std::filesystem::path& path);

// `subject_id,cycle_index,source_label,s0..s63`
std::vector<BeatCycle> parse_cycle_archive(std::string_view text,
                                           std::string_view source = "<memory>");
std::vector<BeatCycle> read_cycle_archive(const std::filesystem::path& path);
std::string format_cycle_archive(std::span<const BeatCycle> cycles);
void write_cycle_archive(std::span<const BeatCycle> cycles,
                         const std::filesystem::path& path);

// `subject_id,cycle_index,source_label,<feature columns>`; cycles whose
// features cannot be extracted are skipped.
std::string format_feature_table(std::span<const BeatCycle> cycles);
void write_feature_table(std::span<const BeatCycle> cycles,
                         const std::filesystem::path& path);

struct DecisionRow {
  std::string subject_id;
  int cycle_index = 0;
  SignalLabel source_label = SignalLabel::kPpg;
  double score = 0.0;
  bool accept = false;
};

// `subject_id,cycle_index,source_label,score,accept`
std::string format_decision_log(std::span<const DecisionRow> rows);
void write_decision_log(std::span<const DecisionRow> rows,
                        const std::filesystem::path& path);

/// Subject identity from a file stem; rejects characters that would break
/// the CSV formats.
std::string subject_id_from_path(const std::filesystem::path& path);

}  // namespace ppgspoof
