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

#include "rppg_extract.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace ppgspoof {

void RgbTrace::validate() const {
  require(std::isfinite(frame_rate_hz) && frame_rate_hz > 0.0,
          ErrorKind::kParameter, "trace: frame rate must be positive");
  require(frames.size() >= 2, ErrorKind::kDataValidity,
          "trace: need at least 2 frames");
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& f = frames[i];
    const bool ok = std::isfinite(f.r) && std::isfinite(f.g) &&
                    std::isfinite(f.b) && f.r >= 0.0 && f.g >= 0.0 &&
                    f.b >= 0.0;
    require(ok, ErrorKind::kDataValidity,
            "trace: invalid channel mean at frame " + std::to_string(i));
  }
  if (skin_pixel_counts) {
    require(skin_pixel_counts->size() == frames.size(),
            ErrorKind::kDataValidity,
            "trace: skin pixel counts do not match frame count");
  }
}

int ChromSpec::window_frames(double frame_rate_hz) const {
  return static_cast<int>(std::lround(window_seconds * frame_rate_hz));
}

void ChromSpec::validate(double frame_rate_hz) const {
  require(window_seconds > 0.0, ErrorKind::kParameter,
          "chrom: window_seconds must be positive");
  require(overlap_fraction >= 0.0 && overlap_fraction < 1.0,
          ErrorKind::kParameter, "chrom: overlap must lie in [0, 1)");
  require(window_seconds * frame_rate_hz >= 8.0, ErrorKind::kParameter,
          "chrom: window must span at least 8 frames");
}

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

WaveSignal chrom_extract(const RgbTrace& trace, const ChromSpec& spec) {
  trace.validate();
  spec.validate(trace.frame_rate_hz);
  const std::size_t n = trace.size();
  const auto win = static_cast<std::size_t>(spec.window_frames(trace.frame_rate_hz));
  require(n >= 2 * win, ErrorKind::kDataValidity,
          "chrom: trace shorter than two extraction windows");

  const std::size_t hop = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(
             static_cast<double>(win) * (1.0 - spec.overlap_fraction))));
  std::vector<std::size_t> starts;
  for (std::size_t s = 0; s + win <= n; s += hop) starts.push_back(s);
  if (starts.back() + win < n) starts.push_back(n - win);

  // Half-sample shifted Hann: strictly positive taps, still constant
  // overlap-add at 50% hop.
  std::vector<double> taper(win);
  for (std::size_t k = 0; k < win; ++k) {
    taper[k] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi *
                                     (static_cast<double>(k) + 0.5) /
                                     static_cast<double>(win)));
  }

  std::vector<double> acc(n, 0.0);
  std::vector<double> weight(n, 0.0);
  std::vector<double> xs(win), ys(win);
  for (std::size_t start : starts) {
    double mr = 0.0, mg = 0.0, mb = 0.0;
    for (std::size_t k = 0; k < win; ++k) {
      const auto& f = trace.frames[start + k];
      mr += f.r;
      mg += f.g;
      mb += f.b;
    }
    const double w = static_cast<double>(win);
    mr /= w;
    mg /= w;
    mb /= w;
    require(mr > 0.0 && mg > 0.0 && mb > 0.0, ErrorKind::kDataValidity,
            "chrom: all-zero channel in window starting at frame " +
                std::to_string(start));
    for (std::size_t k = 0; k < win; ++k) {
      const auto& f = trace.frames[start + k];
      const double rn = f.r / mr;
      const double gn = f.g / mg;
      const double bn = f.b / mb;
      xs[k] = 3.0 * rn - 2.0 * gn;
      ys[k] = 1.5 * rn + gn - 1.5 * bn;
    }
    const double sy = stddev_of(ys);
    const double alpha = sy < 1e-12 ? 1.0 : stddev_of(xs) / sy;
    std::vector<double> s(win);
    for (std::size_t k = 0; k < win; ++k) s[k] = xs[k] - alpha * ys[k];
    const double ms = mean_of(s);
    for (std::size_t k = 0; k < win; ++k) {
      acc[start + k] += taper[k] * (s[k] - ms);
      weight[start + k] += taper[k];
    }
  }
  for (std::size_t i = 0; i < n; ++i) acc[i] /= weight[i];
  return WaveSignal(std::move(acc), trace.frame_rate_hz, SignalLabel::kRppg);
}

RgbTrace decimate_trace(const RgbTrace& trace, double target_fps) {
  trace.validate();
  require(std::isfinite(target_fps) && target_fps > 0.0 &&
              target_fps < trace.frame_rate_hz,
          ErrorKind::kParameter,
          "decimate: target fps must be below the source frame rate");
  const double duration =
      static_cast<double>(trace.size() - 1) / trace.frame_rate_hz;
  const auto count =
      static_cast<std::size_t>(std::floor(duration * target_fps + 1e-9)) + 1;
  RgbTrace out;
  out.frame_rate_hz = target_fps;
  out.frames.reserve(count);
  if (trace.skin_pixel_counts) out.skin_pixel_counts.emplace();
  for (std::size_t j = 0; j < count; ++j) {
    const double t = static_cast<double>(j) / target_fps;
    auto idx = static_cast<std::size_t>(std::llround(t * trace.frame_rate_hz));
    idx = std::min(idx, trace.size() - 1);
    out.frames.push_back(trace.frames[idx]);
    if (trace.skin_pixel_counts)
      out.skin_pixel_counts->push_back((*trace.skin_pixel_counts)[idx]);
  }
  return out;
}

}  // namespace ppgspoof
