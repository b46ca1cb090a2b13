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

#include "waveform_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>

#include "errors.hpp"

namespace ppgspoof {

void BeatCycle::validate() const {
  require(samples.size() == kCycleLength, ErrorKind::kDataValidity,
          "cycle: expected " + std::to_string(kCycleLength) + " samples, got " +
              std::to_string(samples.size()));
  require_finite(samples, "cycle");
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  require(*lo == 0.0 && *hi == 1.0, ErrorKind::kDataValidity,
          "cycle: samples must be min-max normalised to [0, 1]");
}

BeatCycle make_cycle(std::span<const double> raw, SignalLabel label,
                     std::string subject_id, int cycle_index) {
  require(raw.size() >= 2, ErrorKind::kDataValidity,
          "cycle: need at least 2 raw samples");
  require_finite(raw, "cycle");
  std::vector<double> fixed(kCycleLength);
  const double span = static_cast<double>(raw.size() - 1);
  for (std::size_t j = 0; j < kCycleLength; ++j) {
    const double pos =
        span * static_cast<double>(j) / static_cast<double>(kCycleLength - 1);
    const auto k = std::min(static_cast<std::size_t>(pos), raw.size() - 2);
    const double frac = pos - static_cast<double>(k);
    fixed[j] = raw[k] + frac * (raw[k + 1] - raw[k]);
  }
  BeatCycle c;
  c.samples = normalize_cycle(fixed);
  c.source_label = label;
  c.subject_id = std::move(subject_id);
  c.cycle_index = cycle_index;
  return c;
}

namespace {

double dft_power(std::span<const double> x, double mean, double fs, double f) {
  const std::complex<double> rot =
      std::polar(1.0, -2.0 * std::numbers::pi * f / fs);
  std::complex<double> phasor{1.0, 0.0};
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    acc += (x[i] - mean) * phasor;
    phasor *= rot;
    // Renormalise periodically; the recurrence drifts on long signals.
    if ((i & 1023) == 1023) phasor /= std::abs(phasor);
  }
  return std::norm(acc);
}

// A strong diastolic wave can put more power at 2*HR than at HR.
constexpr double kSubharmonicRatio = 0.2;

}  // namespace

double dominant_frequency(const WaveSignal& sig, double min_hz, double max_hz,
                          double step_hz) {
  const auto x = sig.samples();
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  const double fs = sig.sample_rate_hz();
  double best_f = min_hz;
  double best_p = -1.0;
  for (double f = min_hz; f <= max_hz + 1e-12; f += step_hz) {
    const double p = dft_power(x, mean, fs, f);
    if (p > best_p) {
      best_p = p;
      best_f = f;
    }
  }
  // Prefer the subharmonic when it carries a sizeable share of the power.
  const double half = 0.5 * best_f;
  if (half >= min_hz && best_p > 0.0) {
    double sub_f = half, sub_p = -1.0;
    for (double f = half - 10.0 * step_hz; f <= half + 10.0 * step_hz + 1e-12;
         f += step_hz) {
      if (f < min_hz) continue;
      const double p = dft_power(x, mean, fs, f);
      if (p > sub_p) {
        sub_p = p;
        sub_f = f;
      }
    }
    if (sub_p >= kSubharmonicRatio * best_p) return sub_f;
  }
  return best_f;
}

std::vector<std::size_t> find_valleys(const WaveSignal& sig,
                                      const SegmentOptions& opts) {
  const auto x = sig.samples();
  const std::size_t n = x.size();
  std::vector<std::size_t> valleys;
  if (n < 3) return valleys;
  const double f0 =
      dominant_frequency(sig, opts.min_rate_hz, opts.max_rate_hz);
  const auto guard = static_cast<std::size_t>(std::max(
      1.0, std::round(opts.valley_guard_fraction * sig.sample_rate_hz() / f0)));
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(x[i] < x[i - 1] && x[i] <= x[i + 1])) continue;
    const std::size_t lo = i >= guard ? i - guard : 0;
    const std::size_t hi = std::min(n - 1, i + guard);
    bool is_min = true;
    for (std::size_t j = lo; j < i && is_min; ++j) is_min = x[i] < x[j];
    for (std::size_t j = i + 1; j <= hi && is_min; ++j) is_min = x[i] <= x[j];
    if (is_min) valleys.push_back(i);
  }
  return valleys;
}

std::vector<BeatCycle> segment_beats(const WaveSignal& sig,
                                     std::string_view subject_id,
                                     const SegmentOptions& opts) {
  require(sig.duration_s() >= 3.0, ErrorKind::kParameter,
          "segment: waveform shorter than 3 s");
  const auto x = sig.samples();
  const double fs = sig.sample_rate_hz();
  const auto valleys = find_valleys(sig, opts);
  // Valley times in samples, refined by a parabola through the neighbours.
  std::vector<double> t(valleys.size());
  for (std::size_t v = 0; v < valleys.size(); ++v) {
    const std::size_t i = valleys[v];
    t[v] = static_cast<double>(i);
    if (i == 0 || i + 1 >= x.size()) continue;
    const double curv = x[i - 1] - 2.0 * x[i] + x[i + 1];
    if (curv > 0.0) t[v] += std::clamp(0.5 * (x[i - 1] - x[i + 1]) / curv, -0.5, 0.5);
  }
  std::vector<BeatCycle> cycles;
  int index = 0;
  std::vector<double> raw(kCycleLength);
  for (std::size_t v = 1; v < valleys.size(); ++v) {
    const double dur = (t[v] - t[v - 1]) / fs;
    if (dur < opts.min_cycle_s || dur > opts.max_cycle_s) continue;
    const auto span = x.subspan(valleys[v - 1], valleys[v] - valleys[v - 1] + 1);
    if (std::all_of(span.begin(), span.end(),
                    [&](double s) { return s == span.front(); }))
      continue;
    for (std::size_t j = 0; j < kCycleLength; ++j) {
      const double pos = t[v - 1] + (t[v] - t[v - 1]) * static_cast<double>(j) /
                                        static_cast<double>(kCycleLength - 1);
      const auto k = std::min(static_cast<std::size_t>(pos), x.size() - 2);
      raw[j] = x[k] + (pos - static_cast<double>(k)) * (x[k + 1] - x[k]);
    }
    BeatCycle c = make_cycle(raw, sig.label(), std::string(subject_id), index++);
    c.onset_s = t[v - 1] / fs;
    c.duration_s = dur;
    cycles.push_back(std::move(c));
  }
  return cycles;
}

std::vector<double> first_derivative(std::span<const double> c) {
  const std::size_t n = c.size();
  require(n >= 2, ErrorKind::kParameter, "derivative: need >= 2 samples");
  std::vector<double> d(n);
  d[0] = c[1] - c[0];
  d[n - 1] = c[n - 1] - c[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = 0.5 * (c[i + 1] - c[i - 1]);
  return d;
}

const std::array<std::string_view, FiducialFeatures::kCount>&
FiducialFeatures::names() {
  static const std::array<std::string_view, kCount> kNames{
      "sp_idx", "dn_idx", "dp_idx", "a1_area", "a2_area",
      "a2_a1_ratio", "a1", "b1", "ta1", "delta_t"};
  return kNames;
}

std::array<double, FiducialFeatures::kCount> FiducialFeatures::values() const {
  return {static_cast<double>(sp_idx), static_cast<double>(dn_idx),
          static_cast<double>(dp_idx), a1_area, a2_area, a2_a1_ratio, a1, b1,
          static_cast<double>(ta1), static_cast<double>(delta_t)};
}

namespace {

double trapezoid(std::span<const double> y) {
  double area = 0.0;
  for (std::size_t i = 1; i < y.size(); ++i) area += 0.5 * (y[i] + y[i - 1]);
  return area;
}

// First index of the maximum of x over [lo, hi].
std::size_t argmax_in(std::span<const double> x, std::size_t lo,
                      std::size_t hi) {
  std::size_t best = lo;
  for (std::size_t i = lo + 1; i <= hi; ++i)
    if (x[i] > x[best]) best = i;
  return best;
}

std::size_t argmin_in(std::span<const double> x, std::size_t lo,
                      std::size_t hi) {
  std::size_t best = lo;
  for (std::size_t i = lo + 1; i <= hi; ++i)
    if (x[i] < x[best]) best = i;
  return best;
}

// Extrema shallower than this (cycles span [0, 1]) are rounding noise.
constexpr double kFlat = 1e-9;

bool is_local_min(std::span<const double> x, std::size_t i) {
  return x[i] < x[i - 1] - kFlat && x[i] <= x[i + 1];
}

bool is_local_max(std::span<const double> x, std::size_t i) {
  return x[i] > x[i - 1] + kFlat && x[i] >= x[i + 1];
}

}  // namespace

FiducialFeatures extract_features(const BeatCycle& cycle) {
  cycle.validate();
  const std::span<const double> x = cycle.samples;
  const std::size_t n = x.size();
  const auto d = first_derivative(x);

  const std::size_t sp = argmax_in(x, 0, n - 1);
  if (sp == 0 || sp == n - 1) {
    fail(ErrorKind::kFeatureExtraction,
         "features: no interior systolic peak in cycle " +
             std::to_string(cycle.cycle_index) + " of subject " +
             cycle.subject_id);
  }

  std::optional<std::size_t> notch;
  for (std::size_t i = sp + 1; i + 1 < n; ++i) {
    if (is_local_min(x, i)) {
      notch = i;
      break;
    }
  }
  std::size_t dn;
  if (notch) {
    dn = *notch;
  } else {
    // Damped cycle: least-negative local maximum of the slope after SP, or
    // the flattest point of the descent when the slope has no such maximum.
    std::optional<std::size_t> flat;
    for (std::size_t i = sp + 1; i + 1 < n; ++i) {
      if (is_local_max(d, i) && (!flat || d[i] > d[*flat])) flat = i;
    }
    dn = flat ? *flat : argmax_in(d, sp + 1, n - 1);
  }

  std::optional<std::size_t> peak;
  for (std::size_t i = dn + 1; i + 1 < n; ++i) {
    if (is_local_max(x, i) && (!peak || x[i] > x[*peak])) peak = i;
  }
  const std::size_t dp = peak ? *peak : dn;
  if (notch && dp > dn) dn = argmin_in(x, sp + 1, dp);

  FiducialFeatures f;
  f.sp_idx = static_cast<int>(sp);
  f.dn_idx = static_cast<int>(dn);
  f.dp_idx = static_cast<int>(dp);
  f.a1_area = trapezoid(x.first(dn + 1));
  f.a2_area = trapezoid(x.subspan(dn));
  f.a2_a1_ratio = f.a1_area > 0.0 ? f.a2_area / f.a1_area : 0.0;
  const std::size_t ta1 = argmax_in(d, 0, n - 1);
  f.a1 = d[ta1];
  f.ta1 = static_cast<int>(ta1);
  f.b1 = d[argmin_in(d, 0, n - 1)];
  f.delta_t = f.dp_idx - f.sp_idx;
  return f;
}

}  // namespace ppgspoof
