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

#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "signal_core.hpp"

namespace ppgspoof {

inline constexpr std::size_t kCycleLength = 64;

/// One cardiac cycle, resampled to kCycleLength and min-max normalised.
/// onset_s and duration_s locate the cycle in its source waveform; they are
/// bookkeeping for pairing and are not persisted in cycle archives.
struct BeatCycle {
  std::vector<double> samples;
  SignalLabel source_label = SignalLabel::kPpg;
  std::string subject_id;
  int cycle_index = 0;
  double onset_s = 0.0;
  double duration_s = 0.0;

  // Length kCycleLength, finite, min exactly 0 and max exactly 1.
  void validate() const;
};

BeatCycle make_cycle(std::span<const double> raw, SignalLabel label,
                     std::string subject_id, int cycle_index);

struct SegmentOptions {
  double min_cycle_s = 0.25;
  double max_cycle_s = 1.5;
  // Valleys must be the minimum within +/- this fraction of the dominant
  // period, which keeps dicrotic notches from splitting a beat.
  double valley_guard_fraction = 0.45;
  double min_rate_hz = 0.7;
  double max_rate_hz = 4.0;
};

/// Dominant frequency in [min_hz, max_hz] from a direct DFT scan.
double dominant_frequency(const WaveSignal& sig, double min_hz, double max_hz,
                          double step_hz = 0.005);

std::vector<std::size_t> find_valleys(const WaveSignal& sig,
                                      const SegmentOptions& opts = {});

std::vector<BeatCycle> segment_beats(const WaveSignal& sig,
                                     std::string_view subject_id,
                                     const SegmentOptions& opts = {});

std::vector<double> first_derivative(std::span<const double> cycle);

struct FiducialFeatures {
  int sp_idx = 0;
  int dn_idx = 0;
  int dp_idx = 0;
  double a1_area = 0.0;
  double a2_area = 0.0;
  double a2_a1_ratio = 0.0;
  double a1 = 0.0;
  double b1 = 0.0;
  int ta1 = 0;
  int delta_t = 0;

  static constexpr std::size_t kCount = 10;
  static const std::array<std::string_view, kCount>& names();
  std::array<double, kCount> values() const;
};

FiducialFeatures extract_features(const BeatCycle& cycle);

}  // namespace ppgspoof
