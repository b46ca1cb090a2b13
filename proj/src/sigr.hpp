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

// Cycle restoration model: a convolutional generator translating rPPG
// cycles into PPG-like cycles, trained adversarially against a Wasserstein
// critic with gradient penalty plus a paired L1 reconstruction term.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "nn.hpp"
#include "signal_core.hpp"
#include "waveform_analysis.hpp"

namespace ppgspoof {

struct TrainSpec {
  double gp_lambda = 10.0;
  double rec_lambda = 50.0;
  int critic_steps_per_gen_step = 5;
  double learning_rate = 1e-4;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.9;
  int batch_size = 32;
  int epochs = 20;
  long max_steps = 0;  // 0: no cap beyond epochs
  std::uint64_t rng_seed = 1;

  void validate() const;
  std::string to_key_values() const;
  static TrainSpec from_key_values(std::string_view text);
};

/// 1 -> 32 -> 64 -> 32 -> 1 channels, kernel 7, LeakyReLU on the first
/// three layers, linear output.
class Generator {
 public:
  static constexpr std::size_t kLayers = 4;
  struct Cache {
    std::array<nn::ConvCache, kLayers> layers;
  };

  Generator();
  static Generator identity();

  void init(nn::Rng& rng);
  std::vector<double> forward(std::span<const double> cycle,
                              Cache* cache = nullptr) const;
  // Accumulates parameter gradients; returns the input gradient.
  std::vector<double> backward(const Cache& cache,
                               std::span<const double> grad_out);
  void zero_grad();
  void append_blocks(std::vector<nn::ParamBlock>& out);

  std::array<nn::Conv1d, kLayers>& layers() noexcept { return layers_; }
  const std::array<nn::Conv1d, kLayers>& layers() const noexcept {
    return layers_;
  }

 private:
  std::array<nn::Conv1d, kLayers> layers_;
};

/// conv(1->32, k7) -> maxpool2 -> conv(32->64, k7) -> maxpool2 -> affine.
/// Both convolutions use LeakyReLU.
class Critic {
 public:
  struct Cache {
    nn::ConvCache c1, c2;
    nn::PoolCache p1, p2;
    std::vector<double> flat;
    bool valid = false;
  };

  explicit Critic(std::size_t cycle_length = kCycleLength);

  void init(nn::Rng& rng);
  double forward(std::span<const double> x, Cache* cache = nullptr) const;
  // dScore/dx scaled by `upstream`; accumulates parameter gradients on request.
  std::vector<double> backward(const Cache& cache, double upstream,
                               bool accumulate_params = true);
  std::vector<double> input_gradient(std::span<const double> x) const;

  // Returns (||dScore/dx|| - 1)^2 at x and accumulates
  // scale * d/dtheta of it into the parameter gradients.
  double penalty_backward(std::span<const double> x, double scale);

  void zero_grad();
  void append_blocks(std::vector<nn::ParamBlock>& out);

  std::size_t cycle_length() const noexcept { return length_; }
  nn::Conv1d& conv1() noexcept { return c1_; }
  nn::Conv1d& conv2() noexcept { return c2_; }
  nn::Affine& head() noexcept { return head_; }
  const nn::Conv1d& conv1() const noexcept { return c1_; }
  const nn::Conv1d& conv2() const noexcept { return c2_; }
  const nn::Affine& head() const noexcept { return head_; }

 private:
  std::size_t length_;
  nn::Conv1d c1_, c2_;
  nn::Affine head_;
};

/// Mean over the batch of (||grad_x critic(x_hat)|| - 1)^2 with
/// x_hat = eps * real + (1 - eps) * fake, eps ~ U(0, 1) drawn per sample.
/// Works with any critic exposing input_gradient(span) -> vector.
template <class CriticT>
double gradient_penalty(const CriticT& critic,
                        std::span<const std::vector<double>> real,
                        std::span<const std::vector<double>> fake,
                        nn::Rng& rng);

struct LossRecord {
  long step = 0;
  double critic_loss = 0.0;
  double gen_loss = 0.0;
  double gp = 0.0;
  double rec_l1 = 0.0;
};

struct SigrModel {
  Generator generator;
  Critic critic;
  TrainSpec spec;
  std::vector<LossRecord> history;
};

struct CyclePair {
  BeatCycle rppg;
  BeatCycle ppg;
};

SigrModel train_sigr(std::span<const CyclePair> pairs, const TrainSpec& spec);

// Mean of generator -> Savitzky-Golay outputs, before renormalisation.
std::vector<double> restore_profile(const Generator& generator,
                                    std::span<const BeatCycle> cycles,
                                    const SavGolSpec& savgol);
BeatCycle restore(const Generator& generator, std::span<const BeatCycle> cycles,
                  const SavGolSpec& savgol);
inline BeatCycle restore(const SigrModel& model,
                         std::span<const BeatCycle> cycles,
                         const SavGolSpec& savgol) {
  return restore(model.generator, cycles, savgol);
}

void save_sigr(const SigrModel& model, const std::filesystem::path& path);
SigrModel load_sigr(const std::filesystem::path& path);
void write_loss_history_csv(std::span<const LossRecord> history,
                            const std::filesystem::path& path);

// ---------------------------------------------------------------------------

template <class CriticT>
double gradient_penalty(const CriticT& critic,
                        std::span<const std::vector<double>> real,
                        std::span<const std::vector<double>> fake,
                        nn::Rng& rng) {
  require(real.size() == fake.size() && !real.empty(), ErrorKind::kParameter,
          "gradient penalty: batch shapes differ");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double total = 0.0;
  std::vector<double> mix;
  for (std::size_t b = 0; b < real.size(); ++b) {
    require(real[b].size() == fake[b].size(), ErrorKind::kParameter,
            "gradient penalty: sample lengths differ");
    const double eps = unit(rng);
    mix.resize(real[b].size());
    for (std::size_t i = 0; i < mix.size(); ++i)
      mix[i] = eps * real[b][i] + (1.0 - eps) * fake[b][i];
    const std::vector<double> g = critic.input_gradient(mix);
    double sq = 0.0;
    for (double v : g) sq += v * v;
    const double dev = std::sqrt(sq) - 1.0;
    total += dev * dev;
  }
  return total / static_cast<double>(real.size());
}

}  // namespace ppgspoof
