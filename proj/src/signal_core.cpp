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

#include "signal_core.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "errors.hpp"

namespace ppgspoof {

std::string_view label_name(SignalLabel label) noexcept {
  switch (label) {
    case SignalLabel::kPpg: return "PPG";
    case SignalLabel::kRppg: return "RPPG";
    case SignalLabel::kRestored: return "RESTORED";
  }
  return "?";
}

std::optional<SignalLabel> parse_label(std::string_view text) noexcept {
  if (text == "PPG") return SignalLabel::kPpg;
  if (text == "RPPG") return SignalLabel::kRppg;
  if (text == "RESTORED") return SignalLabel::kRestored;
  return std::nullopt;
}

void require_finite(std::span<const double> samples, std::string_view what) {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i])) {
      fail(ErrorKind::kDataValidity, std::string(what) +
                                         ": non-finite sample at index " +
                                         std::to_string(i));
    }
  }
}

WaveSignal::WaveSignal(std::vector<double> samples, double sample_rate_hz,
                       SignalLabel label)
    : samples_(std::move(samples)), rate_(sample_rate_hz), label_(label) {
  require(samples_.size() >= 2, ErrorKind::kDataValidity,
          "waveform needs at least 2 samples");
  require(std::isfinite(rate_) && rate_ > 0.0, ErrorKind::kParameter,
          "sample rate must be positive");
  require_finite(samples_, "waveform");
}

void SavGolSpec::validate() const {
  require(window_len >= 1 && window_len % 2 == 1, ErrorKind::kParameter,
          "savgol window must be odd and positive");
  require(poly_order >= 0 && poly_order < window_len, ErrorKind::kParameter,
          "savgol poly_order must satisfy 0 <= order < window");
}

WaveSignal resample(const WaveSignal& sig, double target_rate_hz) {
  require(std::isfinite(target_rate_hz) && target_rate_hz > 0.0,
          ErrorKind::kParameter, "resample: target rate must be positive");
  const auto x = sig.samples();
  const double src_rate = sig.sample_rate_hz();
  const auto count = static_cast<std::size_t>(
                         std::floor(sig.duration_s() * target_rate_hz + 1e-9)) +
                     1;
  require(count >= 2, ErrorKind::kParameter,
          "resample: target rate too low for the signal duration");
  std::vector<double> out(count);
  const std::size_t last = x.size() - 1;
  for (std::size_t j = 0; j < count; ++j) {
    const double pos = static_cast<double>(j) * src_rate / target_rate_hz;
    auto k = static_cast<std::size_t>(std::floor(pos));
    if (k >= last) {
      out[j] = x[last];
      continue;
    }
    const double frac = pos - static_cast<double>(k);
    out[j] = x[k] + frac * (x[k + 1] - x[k]);
  }
  return WaveSignal(std::move(out), target_rate_hz, sig.label());
}

namespace {

// Direct-form II transposed biquad, a0 normalised to 1.
struct Biquad {
  double b0, b1, b2, a1, a2;

  double dc_gain() const { return (b0 + b1 + b2) / (1.0 + a1 + a2); }

  // State reached after an infinitely long unit step.
  std::array<double, 2> step_state() const {
    const double g = dc_gain();
    const double z2 = b2 - a2 * g;
    const double z1 = b1 - a1 * g + z2;
    return {z1, z2};
  }
};

// Sections of a 4th-order Butterworth edge.
constexpr std::array<double, 2> kButterQ{0.54119610014619698, 1.3065629648763766};

Biquad butter_lowpass(double fc, double fs, double q) {
  const double k = std::tan(std::numbers::pi * fc / fs);
  const double norm = 1.0 / (1.0 + k / q + k * k);
  const double b0 = k * k * norm;
  return {b0, 2.0 * b0, b0, 2.0 * (k * k - 1.0) * norm,
          (1.0 - k / q + k * k) * norm};
}

Biquad butter_highpass(double fc, double fs, double q) {
  const double k = std::tan(std::numbers::pi * fc / fs);
  const double norm = 1.0 / (1.0 + k / q + k * k);
  return {norm, -2.0 * norm, norm, 2.0 * (k * k - 1.0) * norm,
          (1.0 - k / q + k * k) * norm};
}

void sos_filter_inplace(std::span<const Biquad> sections,
                        std::vector<double>& x) {
  const double x0 = x.front();
  double gain = 1.0;
  for (const auto& s : sections) {
    auto zi = s.step_state();
    double z1 = zi[0] * x0 * gain;
    double z2 = zi[1] * x0 * gain;
    for (double& v : x) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
    gain *= s.dc_gain();
  }
}

}  // namespace

WaveSignal bandpass(const WaveSignal& sig, double low_hz, double high_hz) {
  const double fs = sig.sample_rate_hz();
  require(low_hz > 0.0 && low_hz < high_hz && high_hz < fs / 2.0,
          ErrorKind::kParameter,
          "bandpass: need 0 < low < high < Nyquist (" +
              std::to_string(fs / 2.0) + " Hz)");
  const std::array<Biquad, 4> sections{
      butter_highpass(low_hz, fs, kButterQ[0]), butter_highpass(low_hz, fs, kButterQ[1]),
      butter_lowpass(high_hz, fs, kButterQ[0]), butter_lowpass(high_hz, fs, kButterQ[1])};
  const auto x = sig.samples();
  const std::size_t n = x.size();
  const auto wanted = static_cast<std::size_t>(std::ceil(3.0 * fs / low_hz));
  const std::size_t pad = std::min(n - 1, std::max<std::size_t>(15, wanted));

  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i)
    ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  sos_filter_inplace(sections, ext);
  std::reverse(ext.begin(), ext.end());
  sos_filter_inplace(sections, ext);
  std::reverse(ext.begin(), ext.end());

  std::vector<double> out(ext.begin() + static_cast<std::ptrdiff_t>(pad),
                          ext.begin() + static_cast<std::ptrdiff_t>(pad + n));
  return sig.with_samples(std::move(out));
}

std::vector<double> savgol_coefficients(const SavGolSpec& spec,
                                        double eval_pos) {
  spec.validate();
  const int w = spec.window_len;
  const int half = w / 2;
  const int terms = spec.poly_order + 1;
  if (w == 1) return {1.0};
  // Positions are scaled to [-1, 1] to keep the normal equations well
  // conditioned for long windows.
  const double scale = static_cast<double>(half);
  Eigen::MatrixXd design(w, terms);
  for (int r = 0; r < w; ++r) {
    const double u = static_cast<double>(r - half) / scale;
    double p = 1.0;
    for (int c = 0; c < terms; ++c) {
      design(r, c) = p;
      p *= u;
    }
  }
  Eigen::VectorXd basis(terms);
  double p = 1.0;
  for (int c = 0; c < terms; ++c) {
    basis(c) = p;
    p *= eval_pos / scale;
  }
  const Eigen::MatrixXd normal = design.transpose() * design;
  const Eigen::VectorXd z = normal.ldlt().solve(basis);
  const Eigen::VectorXd weights = design * z;
  return {weights.data(), weights.data() + w};
}

std::vector<double> savgol_smooth(std::span<const double> x,
                                  const SavGolSpec& spec) {
  spec.validate();
  const auto w = static_cast<std::size_t>(spec.window_len);
  require(w <= x.size(), ErrorKind::kParameter,
          "savgol: window longer than signal");
  require_finite(x, "savgol input");
  if (w == 1) return {x.begin(), x.end()};
  const std::size_t half = w / 2;
  const std::size_t n = x.size();
  std::vector<double> out(n);

  const auto centre = savgol_coefficients(spec, 0.0);
  for (std::size_t i = half; i + half < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < w; ++j) acc += centre[j] * x[i - half + j];
    out[i] = acc;
  }
  for (std::size_t i = 0; i < half; ++i) {
    const double off = static_cast<double>(i) - static_cast<double>(half);
    const auto head = savgol_coefficients(spec, off);
    const auto tail = savgol_coefficients(spec, -off);
    double acc_head = 0.0;
    double acc_tail = 0.0;
    for (std::size_t j = 0; j < w; ++j) {
      acc_head += head[j] * x[j];
      acc_tail += tail[j] * x[n - w + j];
    }
    out[i] = acc_head;
    out[n - 1 - i] = acc_tail;
  }
  return out;
}

WaveSignal savgol_smooth(const WaveSignal& sig, const SavGolSpec& spec) {
  return sig.with_samples(savgol_smooth(sig.samples(), spec));
}

std::vector<double> normalize_cycle(std::span<const double> x) {
  require(!x.empty(), ErrorKind::kDegenerateInput, "normalize: empty input");
  require_finite(x, "normalize input");
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const double min = *lo;
  const double range = *hi - min;
  require(range > 0.0, ErrorKind::kDegenerateInput,
          "normalize: constant input");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - min) / range;
  return out;
}

}  // namespace ppgspoof
