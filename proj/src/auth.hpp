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

// Per-victim CNN-LSTM authenticator over single cycles, its training,
// score calibration and persistence.

#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nn.hpp"
#include "waveform_analysis.hpp"

namespace ppgspoof {

struct AuthSpec {
  int epochs = 80;
  double learning_rate = 2e-3;
  int batch_size = 16;
  std::uint64_t seed = 7;
  double victim_train_fraction = 0.7;
  double other_train_fraction = 0.1;
  double target_eer = 0.14;
  double eer_tolerance = 0.03;

  void validate() const;
  std::string to_key_values() const;
  static AuthSpec from_key_values(std::string_view text);
};

/// conv(1->16, k5) -> pool -> conv(16->32, k5) -> pool -> LSTM(32) ->
/// affine -> logit.
class AuthNet {
 public:
  struct Cache {
    nn::ConvCache c1, c2;
    nn::PoolCache p1, p2;
    nn::Lstm::Cache lstm;
    std::vector<double> h;
  };

  explicit AuthNet(std::size_t cycle_length = kCycleLength);

  void init(nn::Rng& rng);
  double logit(std::span<const double> x, Cache* cache = nullptr) const;
  void backward(const Cache& cache, double dlogit);
  void zero_grad();
  void append_blocks(std::vector<nn::ParamBlock>& out);

  std::size_t cycle_length() const noexcept { return length_; }
  nn::Conv1d& conv1() noexcept { return c1_; }
  nn::Conv1d& conv2() noexcept { return c2_; }
  nn::Lstm& lstm() noexcept { return lstm_; }
  nn::Affine& head() noexcept { return head_; }
  const nn::Conv1d& conv1() const noexcept { return c1_; }
  const nn::Conv1d& conv2() const noexcept { return c2_; }
  const nn::Lstm& lstm() const noexcept { return lstm_; }
  const nn::Affine& head() const noexcept { return head_; }

 private:
  std::size_t length_;
  nn::Conv1d c1_, c2_;
  nn::Lstm lstm_;
  nn::Affine head_;
};

struct AuthModel {
  AuthNet net;
  AuthSpec spec;
  double threshold = std::numeric_limits<double>::quiet_NaN();
  double noise_sigma = 0.0;  // logit-domain detuning noise
  std::uint64_t noise_seed = 0;
  double eer = std::numeric_limits<double>::quiet_NaN();

  bool calibrated() const noexcept { return threshold == threshold; }
};

struct AuthDataset {
  std::vector<BeatCycle> victim_train, victim_test;
  std::vector<BeatCycle> other_train, other_test;

  /// Per-cycle split with a fixed seed. Victim cycles are split by
  /// `victim_train_fraction`; other subjects contribute
  /// `other_train_fraction` of their cycles each to training.
  static AuthDataset split(std::span<const BeatCycle> victim,
                           std::span<const BeatCycle> others,
                           const AuthSpec& spec);
};

/// Trains on victim_train (label 1) and other_train (label 0) with
/// class-weighted binary cross-entropy. The result is uncalibrated.
AuthModel train_auth(std::span<const BeatCycle> victim_train,
                     std::span<const BeatCycle> other_train,
                     const AuthSpec& spec);
inline AuthModel train_auth(const AuthDataset& data, const AuthSpec& spec) {
  return train_auth(data.victim_train, data.other_train, spec);
}

/// Noise-free network output before the sigmoid, clamped to +-36.
double clean_logit(const AuthModel& model, const BeatCycle& cycle);

/// Score with the model's detuning noise. The noise draw is keyed by the
/// cycle bytes, so equal cycles always get equal scores.
double score(const AuthModel& model, const BeatCycle& cycle);

struct Decision {
  double score = 0.0;
  bool accept = false;
};

/// accept <=> score >= threshold. Raises kUsage on an uncalibrated model.
Decision authenticate(const AuthModel& model, const BeatCycle& cycle);

/// Probe prepared for calibration: a clean logit plus its noise key.
struct CalibrationProbe {
  double logit = 0.0;
  std::uint64_t key = 0;
};

CalibrationProbe make_probe(const AuthModel& model, const BeatCycle& cycle);

struct CalibrationReport {
  double eer = 0.0;
  double threshold = 0.0;
  double noise_sigma = 0.0;
  int iterations = 0;
};

/// Sets threshold at the EER point. When the achieved EER is more than
/// spec.eer_tolerance below the target, logit noise of increasing sigma is
/// injected (then bisected) until it lands within tolerance. Raises
/// kCalibration with the achieved EER when this fails within 20 rounds.
CalibrationReport calibrate(AuthModel& model,
                            std::span<const CalibrationProbe> genuine,
                            std::span<const CalibrationProbe> impostor,
                            double target_eer);
CalibrationReport calibrate(AuthModel& model,
                            std::span<const BeatCycle> genuine,
                            std::span<const BeatCycle> impostor,
                            double target_eer);
/// Score-level calibration: scores in (0, 1) are mapped back to logits and
/// keyed by their bit patterns.
CalibrationReport calibrate_scores(AuthModel& model,
                                   std::span<const double> genuine_scores,
                                   std::span<const double> impostor_scores,
                                   double target_eer);

void save_auth(const AuthModel& model, const std::filesystem::path& path);
AuthModel load_auth(const std::filesystem::path& path);

}  // namespace ppgspoof
