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

#include <random>
#include <string>
#include <vector>

#include "auth.hpp"
#include "waveform_analysis.hpp"

namespace fixture {

// Up- or down-sloping ramp cycles with additive noise.
inline std::vector<ppgspoof::BeatCycle> ramps(int n, bool up, const std::string& id,
                                              std::uint64_t seed) {
  constexpr std::size_t L = ppgspoof::kCycleLength;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 0.05);
  std::vector<ppgspoof::BeatCycle> out;
  for (int i = 0; i < n; ++i) {
    std::vector<double> raw(L);
    for (std::size_t k = 0; k < L; ++k) {
      const double r = static_cast<double>(k) / (L - 1);
      raw[k] = (up ? r : 1.0 - r) + nd(rng);
    }
    auto c = ppgspoof::make_cycle(raw, ppgspoof::SignalLabel::kPpg, id, i);
    c.onset_s = i;
    c.duration_s = 1.0;
    out.push_back(std::move(c));
  }
  return out;
}

inline ppgspoof::AuthSpec toy_auth_spec() {
  ppgspoof::AuthSpec s;
  s.epochs = 30;
  s.other_train_fraction = 0.5;
  return s;
}

struct ToyAuth {
  ppgspoof::AuthDataset data;
  ppgspoof::AuthModel model;
};

// Victim: rising ramps. Others: falling ramps from two subjects.
inline const ToyAuth& toy_auth() {
  static const ToyAuth t = [] {
    ToyAuth r;
    const auto victim = ramps(80, true, "victim", 1);
    auto others = ramps(40, false, "a", 2);
    const auto more = ramps(40, false, "b", 3);
    others.insert(others.end(), more.begin(), more.end());
    r.data = ppgspoof::AuthDataset::split(victim, others, toy_auth_spec());
    r.model = ppgspoof::train_auth(r.data, toy_auth_spec());
    return r;
  }();
  return t;
}

}  // namespace fixture
