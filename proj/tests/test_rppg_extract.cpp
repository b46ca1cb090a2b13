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

#include "errors.hpp"
#include "oracles.hpp"
#include "rppg_extract.hpp"

using namespace ppgspoof;

namespace {

RgbTrace modulated(std::size_t n, double fps, double hz, bool all_channels,
                   double depth = 0.02) {
  RgbTrace t;
  t.frame_rate_hz = fps;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = depth * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / fps);
    const double base_r = 170, base_g = 120, base_b = 95;
    if (all_channels)
      t.frames.push_back({base_r * (1 + m), base_g * (1 + m), base_b * (1 + m)});
    else
      t.frames.push_back({base_r, base_g * (1 + m), base_b});
  }
  return t;
}

std::vector<double> vec(const WaveSignal& s) { return {s.samples().begin(), s.samples().end()}; }

double rms(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s / static_cast<double>(v.size()));
}

// Expected DFT bin of `hz` for n samples at `fps`.
std::size_t bin_of(double hz, std::size_t n, double fps) {
  return static_cast<std::size_t>(std::lround(hz * static_cast<double>(n) / fps));
}

}  // namespace

TEST_SUITE("rppg_extract") {

TEST_CASE("constant trace gives all-zero output") {
  RgbTrace t;
  t.frame_rate_hz = 35.0;
  t.frames.assign(350, Rgb{100, 100, 100});
  const WaveSignal s = chrom_extract(t, ChromSpec{});
  CHECK(s.size() == 350);
  CHECK(s.label() == SignalLabel::kRppg);
  for (double v : s.samples()) CHECK(v == 0.0);
}

TEST_CASE("green modulation at 1.2 Hz peaks at 1.2 Hz") {
  const RgbTrace t = modulated(35 * 30, 35.0, 1.2, false);
  const auto s = vec(chrom_extract(t, ChromSpec{}));
  const std::size_t k = oracle::dft_argmax(s);
  CHECK(std::abs(static_cast<long>(k) - static_cast<long>(bin_of(1.2, s.size(), 35.0))) <= 1);
}

TEST_CASE("intensity flicker is cancelled") {
  const auto g_only = vec(chrom_extract(modulated(35 * 30, 35.0, 1.2, false), ChromSpec{}));
  const auto flicker = vec(chrom_extract(modulated(35 * 30, 35.0, 1.2, true), ChromSpec{}));
  CHECK(rms(flicker) < 0.1 * rms(g_only));
}

TEST_CASE("output mean is near zero and length matches") {
  const auto s = vec(chrom_extract(modulated(35 * 20, 35.0, 1.5, false), ChromSpec{}));
  CHECK(s.size() == 35 * 20);
  double m = 0.0;
  for (double v : s) m += v;
  m /= static_cast<double>(s.size());
  CHECK(std::abs(m) < 0.05 * rms(s));
}

TEST_CASE("uniform channel gain does not change the output") {
  const RgbTrace t = modulated(35 * 20, 35.0, 1.1, false);
  RgbTrace scaled = t;
  for (auto& f : scaled.frames) f = {f.r * 3.7, f.g * 3.7, f.b * 3.7};
  const auto a = vec(chrom_extract(t, ChromSpec{})), b = vec(chrom_extract(scaled, ChromSpec{}));
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-9);
}

TEST_CASE("hann overlap-add has no window-boundary ripple") {
  const ChromSpec spec;
  const auto s = vec(chrom_extract(modulated(35 * 40, 35.0, 1.25, false), spec));
  // Peak amplitude per period in the interior should be flat within 1%.
  const std::size_t period = 28;  // 35 / 1.25
  std::vector<double> peaks;
  for (std::size_t start = 2 * period; start + 3 * period < s.size(); start += period) {
    double p = 0.0;
    for (std::size_t i = start; i < start + period; ++i) p = std::max(p, std::abs(s[i]));
    peaks.push_back(p);
  }
  const auto [lo, hi] = std::minmax_element(peaks.begin(), peaks.end());
  CHECK((*hi - *lo) / *hi < 0.01);
}

TEST_CASE("chrom errors") {
  RgbTrace zero;
  zero.frame_rate_hz = 35.0;
  zero.frames.assign(200, Rgb{0, 100, 100});
  try {
    chrom_extract(zero, ChromSpec{});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDataValidity);
  }
  RgbTrace shortt;
  shortt.frame_rate_hz = 35.0;
  shortt.frames.assign(60, Rgb{100, 100, 100});
  CHECK_THROWS_AS(chrom_extract(shortt, ChromSpec{}), Error);  // shorter than two windows
  RgbTrace neg = shortt;
  neg.frames.assign(200, Rgb{-1, 100, 100});
  CHECK_THROWS_AS(neg.validate(), Error);
  CHECK_THROWS_AS(ChromSpec({0.1, 0.5}).validate(35.0), Error);   // < 8 samples
  CHECK_THROWS_AS(ChromSpec({1.6, 1.0}).validate(35.0), Error);   // overlap must be < 1
}

TEST_CASE("decimate 35 to 20 FPS") {
  const RgbTrace t = modulated(350, 35.0, 1.2, false);
  const RgbTrace d = decimate_trace(t, 20.0);
  CHECK(d.frame_rate_hz == 20.0);
  CHECK(d.size() == 200);
  RgbTrace c;
  c.frame_rate_hz = 35.0;
  c.frames.assign(350, Rgb{10, 20, 30});
  for (const auto& f : decimate_trace(c, 20.0).frames) {
    CHECK(f.r == 10);
    CHECK(f.g == 20);
    CHECK(f.b == 30);
  }
  CHECK_THROWS_AS(decimate_trace(t, 35.0), Error);
  CHECK_THROWS_AS(decimate_trace(t, 50.0), Error);
}

TEST_CASE("decimated trace keeps the 1.2 Hz peak") {
  const RgbTrace d = decimate_trace(modulated(35 * 30, 35.0, 1.2, false), 20.0);
  const auto s = vec(chrom_extract(d, ChromSpec{}));
  const std::size_t k = oracle::dft_argmax(s);
  CHECK(std::abs(static_cast<long>(k) - static_cast<long>(bin_of(1.2, s.size(), 20.0))) <= 1);
}

}  // TEST_SUITE
