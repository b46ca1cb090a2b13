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

// Spoofing-attack protocol: cycle preparation, pairing, per-victim attacks,
// the cohort experiment and report emission.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "auth.hpp"
#include "rppg_extract.hpp"
#include "sigr.hpp"
#include "signal_core.hpp"
#include "synth.hpp"
#include "waveform_analysis.hpp"

namespace ppgspoof {

enum class AttackKind { kRandom = 0, kRppg, kSigr, kMeanRppg, kMeanSigr };
inline constexpr std::size_t kAttackKinds = 5;
std::string_view attack_name(AttackKind kind) noexcept;

enum class ProbeMode { kSingle, kMean };

/// Single: fraction of cycles accepted. Mean: the cycles are averaged into one
/// probe (pointwise mean, renormalised) and the result is 0 or 1.
double run_attack(const AuthModel& auth, std::span<const BeatCycle> cycles,
                  ProbeMode mode);

/// Pointwise mean of the cycles, min-max renormalised.
BeatCycle mean_cycle(std::span<const BeatCycle> cycles);

struct PrepSpec {
  ChromSpec chrom;
  BandSpec band;
  SegmentOptions segment;
  bool segment_bandpass = true;  // band-pass again right before segmenting
};

/// Band-pass (when enabled) then segment.
std::vector<BeatCycle> cycles_from_waveform(const WaveSignal& sig,
                                            std::string_view subject_id,
                                            const PrepSpec& prep);
/// CHROM, band-pass, then cycles_from_waveform.
WaveSignal rppg_from_trace(const RgbTrace& trace, const PrepSpec& prep);
std::vector<BeatCycle> cycles_from_trace(const RgbTrace& trace,
                                         std::string_view subject_id,
                                         const PrepSpec& prep);

/// Pairs each rPPG cycle with the reference cycle of nearest onset, keeping
/// pairs whose onsets differ by at most `max_offset_fraction` of the
/// reference cycle duration. Each reference cycle is used at most once.
std::vector<CyclePair> pair_cycles(std::span<const BeatCycle> rppg,
                                   std::span<const BeatCycle> ppg,
                                   double max_offset_fraction = 0.5);

struct SubjectCycles {
  std::string subject_id;
  std::vector<BeatCycle> ppg;
  std::vector<BeatCycle> rppg;
  std::vector<BeatCycle> rppg_low_fps;
  std::vector<CyclePair> pairs;
};

// Restoration training budget for desk-scale cohort runs: a higher learning
// rate than the TrainSpec default and a hard step cap.
inline TrainSpec desk_scale_sigr() {
  TrainSpec t;
  t.learning_rate = 5e-4;
  t.epochs = 1000;
  t.max_steps = 400;
  return t;
}

struct ExperimentSpec {
  int n_subjects = 12;
  SyntheticSubjectSpec synth;
  PrepSpec prep;
  SavGolSpec savgol;
  TrainSpec sigr = desk_scale_sigr();
  int sigr_folds = 4;
  AuthSpec auth;
  double low_fps = 20.0;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Fold of subject `index` (in sorted id order).
inline int fold_of(std::size_t index, int folds) {
  return static_cast<int>(index % static_cast<std::size_t>(folds));
}

/// Callbacks used to persist or reuse trained models. Any of them may be
/// empty. `load_*` returning nullopt triggers training followed by `save_*`.
struct ModelStore {
  std::function<std::optional<SigrModel>(int fold)> load_sigr;
  std::function<void(int fold, const SigrModel&)> save_sigr;
  std::function<std::optional<AuthModel>(const std::string& id)> load_auth;
  std::function<void(const std::string& id, const AuthModel&)> save_auth;
};

using ProgressFn = std::function<void(const std::string&)>;

struct VictimResult {
  std::string subject_id;
  int fold = 0;
  double eer = 0.0;
  double threshold = 0.0;
  double noise_sigma = 0.0;
  std::array<double, kAttackKinds> far{};
  double far_rppg_low_fps = 0.0;
  double far_sigr_low_fps = 0.0;
  double pearson_rppg = 0.0;  // mean over time-paired cycles vs reference
  double pearson_sigr = 0.0;
  std::size_t n_pairs = 0;
  std::array<double, FiducialFeatures::kCount> ks_rppg{};
  std::array<double, FiducialFeatures::kCount> ks_sigr{};
};

struct AttackReport {
  std::vector<VictimResult> victims;
  std::vector<std::pair<std::string, std::string>> metadata;

  double mean_far(AttackKind kind) const;
  double mean_of(double VictimResult::*field) const;
  std::array<double, FiducialFeatures::kCount> mean_ks(bool restored) const;
};

/// Trains one restoration model per fold on the other folds' pairs.
SigrModel train_fold_model(std::span<const SubjectCycles> subjects, int fold,
                           const ExperimentSpec& spec);

/// Authenticator split for victim `v`: its own reference cycles against
/// every other subject's.
AuthSpec victim_auth_spec(const ExperimentSpec& spec, std::size_t v);
AuthDataset victim_dataset(std::span<const SubjectCycles> subjects, std::size_t v,
                           const ExperimentSpec& spec);
/// Trains and calibrates the authenticator of victim `v`.
AuthModel train_victim_auth(std::span<const SubjectCycles> subjects, std::size_t v,
                            const ExperimentSpec& spec);

/// Runs the whole protocol on prepared subject data (sorted by id).
AttackReport run_protocol(std::span<const SubjectCycles> subjects,
                          const ExperimentSpec& spec, const ModelStore& store = {},
                          const ProgressFn& progress = {});

/// Prepares subjects from a synthetic cohort: reference PPG cycles from the
/// 65 Hz waveform, rPPG cycles from a rendered skin trace (full and
/// decimated frame rate), and time-paired cycles.
std::vector<SubjectCycles> prepare_subjects(
    std::span<const SyntheticSubject> cohort, const ExperimentSpec& spec);
SubjectCycles prepare_subject(std::string subject_id, const WaveSignal& ppg,
                              const RgbTrace& trace, const ExperimentSpec& spec);

/// Writes report.csv, report.txt and manifest.txt into `dir`.
void emit_report(const AttackReport& report, const std::filesystem::path& dir);

}  // namespace ppgspoof
