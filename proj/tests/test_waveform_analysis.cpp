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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "errors.hpp"
#include "oracles.hpp"
#include "synth.hpp"
#include "waveform_analysis.hpp"

using namespace ppgspoof;

namespace {

constexpr std::size_t L = kCycleLength;

BeatCycle cycle_of(const std::vector<double>& raw) {
  return make_cycle(raw, SignalLabel::kPpg, "s", 0);
}

std::vector<double> pulse_cycle(const PulseShape& p, std::size_t n = L) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = pulse_value(p, static_cast<double>(i) / static_cast<double>(n));
  return v;
}

WaveSignal pulse_train(const PulseShape& p, double bpm, double seconds, double rate) {
  const std::size_t n = static_cast<std::size_t>(seconds * rate);
  std::vector<double> v(n);
  const double f = bpm / 60.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ph = static_cast<double>(i) / rate * f;
    v[i] = pulse_value(p, ph - std::floor(ph));
  }
  return WaveSignal(v, rate);
}

double trapz(std::span<const double> v, std::size_t a, std::size_t b) {
  double s = 0.0;
  for (std::size_t i = a; i < b; ++i) s += 0.5 * (v[i] + v[i + 1]);
  return s;
}

}  // namespace

TEST_SUITE("waveform_analysis") {

TEST_CASE("make_cycle resamples and normalises") {
  std::vector<double> raw(50);
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = std::sin(static_cast<double>(i) / 8.0) * 3 + 7;
  const BeatCycle c = make_cycle(raw, SignalLabel::kRppg, "abc", 4);
  CHECK(c.samples.size() == L);
  CHECK(c.subject_id == "abc");
  CHECK(c.cycle_index == 4);
  CHECK(*std::min_element(c.samples.begin(), c.samples.end()) == 0.0);
  CHECK(*std::max_element(c.samples.begin(), c.samples.end()) == 1.0);
  CHECK_NOTHROW(c.validate());
  BeatCycle bad = c;
  bad.samples.pop_back();
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = c;
  bad.samples[3] = 1.5;
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK_THROWS_AS(make_cycle(std::vector<double>(30, 2.0), SignalLabel::kPpg, "s", 0), Error);
}

TEST_CASE("1 Hz sinusoid at 64 Hz for 10 s gives 9 interior cycles") {
  const WaveSignal s(oracle::sine(640, 1.0, 64.0), 64.0);
  // Oracle: valleys of sin at t = 0.75 + k, k = 0..9 -> 10 valleys, 9 cycles.
  const auto cycles = segment_beats(s, "sine");
  REQUIRE(cycles.size() == 9);
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    CHECK(cycles[i].cycle_index == static_cast<int>(i));
    CHECK(std::abs(cycles[i].duration_s * 64.0 - 64.0) <= 1.0);
    if (i > 0) CHECK(cycles[i].onset_s > cycles[i - 1].onset_s);
  }
}

TEST_CASE("constant signal gives no cycles") {
  const WaveSignal s(std::vector<double>(64 * 10, 1.0), 64.0);
  CHECK(segment_beats(s, "flat").empty());
}

TEST_CASE("two-Gaussian pulse train at 75 bpm over 60 s gives 74 +- 1 cycles") {
  const WaveSignal s = pulse_train(PulseShape{}, 75.0, 60.0, 65.0);
  // Oracle: one valley per beat; 75 beats, first and last partial.
  const std::size_t expected = 74;
  const auto cycles = segment_beats(s, "p");
  CHECK(std::abs(static_cast<long>(cycles.size()) - static_cast<long>(expected)) <= 1);
}

TEST_CASE("perfectly periodic signal gives near-identical cycles") {
  const WaveSignal s = pulse_train(PulseShape{}, 60.0, 20.0, 64.0);
  const auto cycles = segment_beats(s, "p");
  REQUIRE(cycles.size() >= 10);
  for (std::size_t i = 1; i < cycles.size(); ++i)
    CHECK(oracle::pearson(cycles[0].samples, cycles[i].samples) > 0.999);
}

TEST_CASE("cycle duration bounds discard long gaps") {
  // 0.5 Hz: 2 s cycles lie outside [0.25, 1.5] s.
  const WaveSignal s(oracle::sine(64 * 20, 0.5, 64.0), 64.0);
  SegmentOptions opts;
  opts.min_rate_hz = 0.3;
  CHECK(segment_beats(s, "slow", opts).empty());
}

TEST_CASE("dominant frequency matches a DFT scan") {
  const WaveSignal s(oracle::sine(65 * 30, 1.37, 65.0), 65.0);
  CHECK(dominant_frequency(s, 0.7, 4.0) == doctest::Approx(1.37).epsilon(0.005));
}

TEST_CASE("first derivative of ramps") {
  std::vector<double> up(L), down(L);
  for (std::size_t i = 0; i < L; ++i) {
    up[i] = static_cast<double>(i) / (L - 1);
    down[i] = 1.0 - up[i];
  }
  for (double d : first_derivative(up)) CHECK(d == doctest::Approx(1.0 / (L - 1)).epsilon(1e-12));
  for (double d : first_derivative(down)) CHECK(d == doctest::Approx(-1.0 / (L - 1)).epsilon(1e-12));
}

TEST_CASE("first derivative of a sinusoid cycle matches the analytic cosine") {
  std::vector<double> x(L);
  const double w = 2.0 * std::numbers::pi / (L - 1);
  for (std::size_t i = 0; i < L; ++i) x[i] = 0.5 - 0.5 * std::cos(w * static_cast<double>(i));
  const auto d = first_derivative(x);
  // Interior central differences; one-sided ends carry O(h) error by design.
  for (std::size_t i = 1; i + 1 < L; ++i)
    CHECK(std::abs(d[i] - 0.5 * w * std::sin(w * static_cast<double>(i))) < 0.005 * 0.5 * w);
}

TEST_CASE("triangle features") {
  std::vector<double> tri(L);
  for (std::size_t i = 0; i < L; ++i)
    tri[i] = 1.0 - std::abs(static_cast<double>(i) - L / 2.0) / (L / 2.0);
  const BeatCycle c = cycle_of(tri);
  REQUIRE(c.samples == tri);
  const FiducialFeatures f = extract_features(c);
  CHECK(f.sp_idx == static_cast<int>(L / 2));
  CHECK(f.a1 == doctest::Approx(2.0 / L).epsilon(1e-12));
  CHECK(f.ta1 < static_cast<int>(L / 2));
  CHECK(f.b1 == doctest::Approx(-2.0 / L).epsilon(1e-12));
}

TEST_CASE("two-Gaussian pulse fiducials sit on the component peaks") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> c1(0.15, 0.28), c2(0.45, 0.6), a2(0.35, 0.6);
  for (int trial = 0; trial < 40; ++trial) {
    PulseShape p;
    p.c1 = c1(rng);
    p.c2 = c2(rng);
    p.a2 = a2(rng);
    const FiducialFeatures f = extract_features(cycle_of(pulse_cycle(p)));
    // Oracle: extrema of the closed-form pulse at 10x oversampling.
    const auto fine = pulse_cycle(p, 10 * L);
    std::size_t gmax = 0;
    for (std::size_t i = 1; i < fine.size(); ++i)
      if (fine[i] > fine[gmax]) gmax = i;
    std::size_t second = gmax;
    for (std::size_t i = gmax + 1; i + 1 < fine.size(); ++i)
      if (fine[i] > fine[i - 1] && fine[i] >= fine[i + 1]) second = i;
    CHECK(std::abs(f.sp_idx - static_cast<double>(gmax) / 10.0) <= 2.0);
    CHECK(std::abs(f.dp_idx - static_cast<double>(second) / 10.0) <= 3.0);
  }
}

TEST_CASE("feature invariants on random pulses") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    PulseShape p;
    p.c1 = 0.12 + 0.15 * u(rng);
    p.w1 = 0.05 + 0.04 * u(rng);
    p.c2 = p.c1 + 0.2 + 0.2 * u(rng);
    p.w2 = 0.06 + 0.06 * u(rng);
    p.a2 = 0.2 + 0.6 * u(rng);
    const auto raw = pulse_cycle(p);
    const BeatCycle c = cycle_of(raw);
    FiducialFeatures f;
    try {
      f = extract_features(c);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kFeatureExtraction);
      continue;
    }
    CHECK(0 < f.sp_idx);
    CHECK(f.sp_idx < f.dn_idx);
    CHECK(f.dn_idx <= f.dp_idx);
    CHECK(f.dp_idx < static_cast<int>(L));
    CHECK(f.delta_t == f.dp_idx - f.sp_idx);
    CHECK(f.a1_area >= 0.0);
    CHECK(f.a2_area >= 0.0);
    CHECK(std::abs(f.a1_area + f.a2_area - trapz(c.samples, 0, L - 1)) < 1e-9);
    if (f.a1_area > 0) CHECK(f.a2_a1_ratio == doctest::Approx(f.a2_area / f.a1_area));

    // Affine rescaling of the raw cycle changes nothing.
    std::vector<double> scaled(raw);
    for (double& v : scaled) v = 4.2 * v - 1.3;
    const FiducialFeatures g = extract_features(cycle_of(scaled));
    CHECK(g.sp_idx == f.sp_idx);
    CHECK(g.dn_idx == f.dn_idx);
    CHECK(g.dp_idx == f.dp_idx);
    CHECK(g.ta1 == f.ta1);
    CHECK(std::abs(g.a1_area - f.a1_area) < 1e-9);
    CHECK(std::abs(g.a2_area - f.a2_area) < 1e-9);
  }
}

TEST_CASE("damped cycle without a notch uses the derivative fallback") {
  PulseShape p;
  p.c2 = 0.36;
  p.w2 = 0.12;
  p.a2 = 0.6;  // the second bump merges into a shoulder
  const FiducialFeatures f = extract_features(cycle_of(pulse_cycle(p)));
  CHECK(f.sp_idx < f.dn_idx);
  CHECK(f.dn_idx <= f.dp_idx);
}

TEST_CASE("monotone cycle is a feature-extraction error") {
  std::vector<double> up(L);
  for (std::size_t i = 0; i < L; ++i) up[i] = static_cast<double>(i);
  try {
    extract_features(cycle_of(up));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kFeatureExtraction);
  }
}

TEST_CASE("feature names") {
  CHECK(FiducialFeatures::names().size() == FiducialFeatures::kCount);
  CHECK(FiducialFeatures::names()[0] == "sp_idx");
  CHECK(FiducialFeatures::names()[9] == "delta_t");
}

}  // TEST_SUITE
