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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ppgspoof {

enum class SignalLabel { kPpg, kRppg, kRestored };

std::string_view label_name(SignalLabel label) noexcept;
std::optional<SignalLabel> parse_label(std::string_view text) noexcept;

/// Uniformly sampled 1-D waveform. Construction validates: at least two
/// samples, a positive sample rate and finite amplitudes.
class WaveSignal {
 public:
  WaveSignal(std::vector<double> samples, double sample_rate_hz,
             SignalLabel label = SignalLabel::kPpg);

  std::span<const double> samples() const noexcept { return samples_; }
  double sample_rate_hz() const noexcept { return rate_; }
  SignalLabel label() const noexcept { return label_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double duration_s() const noexcept {
    return static_cast<double>(samples_.size() - 1) / rate_;
  }

  WaveSignal with_samples(std::vector<double> samples) const {
    return WaveSignal(std::move(samples), rate_, label_);
  }

 private:
  std::vector<double> samples_;
  double rate_;
  SignalLabel label_;
};

struct SavGolSpec {
  int window_len = 9;
  int poly_order = 3;

  // window_len == 1 is accepted as the identity filter.
  void validate() const;
};

struct BandSpec {
  double low_hz = 0.7;
  double high_hz = 4.0;
};

// Linear interpolation onto a uniform grid at target_rate_hz starting at t=0.
WaveSignal resample(const WaveSignal& sig, double target_rate_hz);

// Zero-phase Butterworth band-pass, 4th order at each edge (a 4th-order
// high-pass cascaded with a 4th-order low-pass), applied forward-backward
// with odd-extension padding and steady-state initial conditions.
WaveSignal bandpass(const WaveSignal& sig, double low_hz, double high_hz);
inline WaveSignal bandpass(const WaveSignal& sig, const BandSpec& band) {
  return bandpass(sig, band.low_hz, band.high_hz);
}

/// Least-squares polynomial smoothing weights for evaluating the fit at
/// position `eval_pos` (relative to the window centre, in samples).
std::vector<double> savgol_coefficients(const SavGolSpec& spec,
                                        double eval_pos = 0.0);

/// Savitzky-Golay smoothing. Interior samples use the centred window; the
/// first and last half-windows are evaluated on the polynomial fitted to
/// the first/last full window, so polynomials of degree <= poly_order are
/// reproduced everywhere.
std::vector<double> savgol_smooth(std::span<const double> samples,
                                  const SavGolSpec& spec);
WaveSignal savgol_smooth(const WaveSignal& sig, const SavGolSpec& spec);

// Min-max scaling onto [0, 1]. Throws kDegenerateInput on constant input.
std::vector<double> normalize_cycle(std::span<const double> samples);

void require_finite(std::span<const double> samples, std::string_view what);

}  // namespace ppgspoof
