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

#include <cstdint>
#include <optional>
#include <vector>

#include "signal_core.hpp"

namespace ppgspoof {

struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
};

/// Per-frame mean skin colour. Channel means must be finite and
/// non-negative; validate() enforces that.
struct RgbTrace {
  std::vector<Rgb> frames;
  double frame_rate_hz = 0.0;
  std::optional<std::vector<std::uint64_t>> skin_pixel_counts;

  void validate() const;
  std::size_t size() const noexcept { return frames.size(); }
};

struct ChromSpec {
  double window_seconds = 1.6;
  double overlap_fraction = 0.5;

  int window_frames(double frame_rate_hz) const;
  void validate(double frame_rate_hz) const;
};

// Chrominance projection per Hann-weighted window, overlap-added into a
// signal of the same length as the trace (label RPPG, rate = frame rate).
WaveSignal chrom_extract(const RgbTrace& trace, const ChromSpec& spec);

// Nearest-time frame selection onto a slower uniform grid.
RgbTrace decimate_trace(const RgbTrace& trace, double target_fps);

}  // namespace ppgspoof
