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

#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "errors.hpp"

namespace ppgspoof {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double gauss(double x, double c, double w) {
  const double z = (x - c) / w;
  return std::exp(-0.5 * z * z);
}

struct Beat {
  double onset = 0.0;
  double ibi = 0.0;
  double a2_scale = 1.0;
};

// Renders sum over beats; `shift_s` delays the second component.
std::vector<double> render(const std::vector<Beat>& beats, const PulseShape& p,
                           double rate, double duration, double shift_s) {
  const auto n = static_cast<std::size_t>(std::floor(duration * rate + 1e-9)) + 1;
  std::vector<double> out(n, 0.0);
  for (const Beat& b : beats) {
    const double c1 = b.onset + p.c1 * b.ibi, s1 = p.w1 * b.ibi;
    const double c2 = b.onset + p.c2 * b.ibi + shift_s, s2 = p.w2 * b.ibi;
    const double lo = std::min(c1 - 6.0 * s1, c2 - 6.0 * s2);
    const double hi = std::max(c1 + 6.0 * s1, c2 + 6.0 * s2);
    const auto first = static_cast<std::ptrdiff_t>(std::ceil(lo * rate));
    const auto last = static_cast<std::ptrdiff_t>(std::floor(hi * rate));
    for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(first, 0);
         i <= last && i < static_cast<std::ptrdiff_t>(n); ++i) {
      const double t = static_cast<double>(i) / rate;
      out[static_cast<std::size_t>(i)] +=
          p.a1 * gauss(t, c1, s1) + p.a2 * b.a2_scale * gauss(t, c2, s2);
    }
  }
  return out;
}

}  // namespace

void PulseShape::validate() const {
  require(w1 > 0.0 && w2 > 0.0, ErrorKind::kParameter,
          "pulse shape: widths must be positive");
  require(a1 > 0.0 && a2 >= 0.0, ErrorKind::kParameter,
          "pulse shape: amplitudes must be non-negative, a1 positive");
  require(std::isfinite(c1) && std::isfinite(c2) && c1 < c2,
          ErrorKind::kParameter, "pulse shape: need c1 < c2");
}

void SyntheticSubjectSpec::validate() const {
  pulse.validate();
  require(heart_rate_bpm > 0.0 && heart_rate_jitter_bpm >= 0.0 &&
              heart_rate_bpm - heart_rate_jitter_bpm >= 40.0 &&
              heart_rate_bpm + heart_rate_jitter_bpm <= 180.0,
          ErrorKind::kParameter, "synthetic spec: heart rate out of range");
  require(warp_gamma > 0.0 && noise_sigma >= 0.0 && ppg_noise_sigma >= 0.0,
          ErrorKind::kParameter, "synthetic spec: bad distortion parameters");
  require(phase_shift_s >= 0.0 && center_jitter >= 0.0 && width_jitter >= 0.0 &&
              amplitude_jitter >= 0.0 && amplitude_jitter < 1.0 &&
              ibi_variability >= 0.0 && ibi_variability < 0.3 &&
              beat_amplitude_jitter >= 0.0 && beat_amplitude_jitter < 1.0,
          ErrorKind::kParameter, "synthetic spec: bad jitter parameters");
  require(pulse.w1 - width_jitter > 0.0 && pulse.w2 - width_jitter > 0.0,
          ErrorKind::kParameter, "synthetic spec: width jitter exceeds width");
  require(ppg_rate_hz > 0.0 && rppg_rate_hz > 0.0 && duration_s >= 3.0,
          ErrorKind::kParameter, "synthetic spec: bad rates or duration");
}

double pulse_value(const PulseShape& p, double phase) {
  return p.a1 * gauss(phase, p.c1, p.w1) + p.a2 * gauss(phase, p.c2, p.w2);
}

std::vector<SyntheticSubject> make_synthetic_cohort(
    int n_subjects, const SyntheticSubjectSpec& spec) {
  require(n_subjects >= 2, ErrorKind::kParameter,
          "synthetic cohort: need at least 2 subjects");
  spec.validate();
  std::vector<SyntheticSubject> cohort;
  cohort.reserve(static_cast<std::size_t>(n_subjects));
  for (int s = 0; s < n_subjects; ++s) {
    std::mt19937_64 rng(splitmix64(spec.rng_seed ^ splitmix64(static_cast<std::uint64_t>(s))));
    std::uniform_real_distribution<double> sym(-1.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    PulseShape p = spec.pulse;
    p.c1 += spec.center_jitter * sym(rng);
    p.w1 += spec.width_jitter * sym(rng);
    p.a2 *= 1.0 + spec.amplitude_jitter * sym(rng);
    p.c2 += spec.center_jitter * sym(rng);
    p.w2 += spec.width_jitter * sym(rng);
    p.validate();
    const double hr = spec.heart_rate_bpm + spec.heart_rate_jitter_bpm * sym(rng);
    const double period = 60.0 / hr;

    std::vector<Beat> beats;
    for (double onset = -period; onset < spec.duration_s + period;) {
      Beat b;
      b.onset = onset;
      b.ibi = period * std::clamp(1.0 + spec.ibi_variability * normal(rng), 0.7, 1.3);
      b.a2_scale = std::max(0.0, 1.0 + spec.beat_amplitude_jitter * normal(rng));
      beats.push_back(b);
      onset += b.ibi;
    }

    auto ppg = render(beats, p, spec.ppg_rate_hz, spec.duration_s, 0.0);
    for (double& v : ppg) v += spec.ppg_noise_sigma * normal(rng);

    auto rppg = render(beats, p, spec.rppg_rate_hz, spec.duration_s,
                       spec.phase_shift_s);
    const auto [lo, hi] = std::minmax_element(rppg.begin(), rppg.end());
    const double vmin = *lo, span = *hi - *lo;
    require(span > 0.0, ErrorKind::kParameter, "synthetic cohort: flat pulse");
    for (double& v : rppg) {
      v = std::pow((v - vmin) / span, spec.warp_gamma) +
          spec.noise_sigma * normal(rng);
    }

    char id[32];
    std::snprintf(id, sizeof(id), "subject%02d", s + 1);
    cohort.push_back({id, p, hr,
                      WaveSignal(std::move(ppg), spec.ppg_rate_hz, SignalLabel::kPpg),
                      WaveSignal(std::move(rppg), spec.rppg_rate_hz,
                                 SignalLabel::kRppg)});
  }
  return cohort;
}

RgbTrace render_trace(const WaveSignal& rppg, double depth) {
  require(depth > 0.0 && depth < 0.5, ErrorKind::kParameter,
          "render_trace: depth must lie in (0, 0.5)");
  const auto s = rppg.samples();
  const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
  const double span = *hi - *lo;
  constexpr Rgb kBase{170.0, 120.0, 95.0};
  constexpr Rgb kSignature{0.33, 0.77, 0.53};
  RgbTrace trace;
  trace.frame_rate_hz = rppg.sample_rate_hz();
  trace.frames.reserve(s.size());
  for (double v : s) {
    const double p = span > 0.0 ? (v - *lo) / span : 0.0;
    trace.frames.push_back({kBase.r * (1.0 - depth * kSignature.r * p),
                            kBase.g * (1.0 - depth * kSignature.g * p),
                            kBase.b * (1.0 - depth * kSignature.b * p)});
  }
  trace.skin_pixel_counts = std::vector<std::uint64_t>(s.size(), 4096);
  return trace;
}

}  // namespace ppgspoof
