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

// Parametric synthetic subjects: paired reference PPG and distorted rPPG
// waveforms built from a two-Gaussian pulse model, plus a renderer that turns
// an rPPG waveform into a skin-colour trace.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rppg_extract.hpp"
#include "signal_core.hpp"

namespace ppgspoof {

/// Two Gaussian bumps in beat-phase units (centre and width are fractions
/// of the inter-beat interval).
struct PulseShape {
  double a1 = 1.0, c1 = 0.22, w1 = 0.07;
  double a2 = 0.5, c2 = 0.50, w2 = 0.10;

  void validate() const;
};

struct SyntheticSubjectSpec {
  PulseShape pulse;
  double heart_rate_bpm = 72.0;
  // rPPG distortion
  double phase_shift_s = 0.1;  // diastolic component delay
  double warp_gamma = 1.3;     // exponent on the normalised waveform
  double noise_sigma = 0.02;
  // per-subject spread around the template
  double center_jitter = 0.04;
  double width_jitter = 0.015;
  double amplitude_jitter = 0.15;
  double heart_rate_jitter_bpm = 8.0;
  double ibi_variability = 0.03;  // relative beat-to-beat interval spread
  double beat_amplitude_jitter = 0.05;
  double ppg_noise_sigma = 0.005;
  double ppg_rate_hz = 65.0;
  double rppg_rate_hz = 35.0;
  double duration_s = 120.0;
  std::uint64_t rng_seed = 2024;

  void validate() const;
};

struct SyntheticSubject {
  std::string subject_id;
  PulseShape pulse;
  double heart_rate_bpm = 0.0;
  WaveSignal ppg;
  WaveSignal rppg;
};

double pulse_value(const PulseShape& p, double phase);

std::vector<SyntheticSubject> make_synthetic_cohort(
    int n_subjects, const SyntheticSubjectSpec& spec);

/// Skin trace whose chrominance carries `rppg`: each channel is
/// base * (1 - depth * signature * p) with p the min-max scaled waveform.
RgbTrace render_trace(const WaveSignal& rppg, double depth = 0.01);

}  // namespace ppgspoof
