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

#include "experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "errors.hpp"
#include "metrics.hpp"
#include "serialize.hpp"

namespace ppgspoof {

std::string_view attack_name(AttackKind kind) noexcept {
  switch (kind) {
    case AttackKind::kRandom: return "random";
    case AttackKind::kRppg: return "rppg";
    case AttackKind::kSigr: return "sigr";
    case AttackKind::kMeanRppg: return "mean_rppg";
    case AttackKind::kMeanSigr: return "mean_sigr";
  }
  return "unknown";
}

BeatCycle mean_cycle(std::span<const BeatCycle> cycles) {
  require(!cycles.empty(), ErrorKind::kParameter, "mean_cycle: no cycles");
  std::vector<double> acc(cycles.front().samples.size(), 0.0);
  for (const auto& c : cycles) {
    c.validate();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += c.samples[i];
  }
  for (double& v : acc) v /= static_cast<double>(cycles.size());
  BeatCycle out = cycles.front();
  out.samples = normalize_cycle(acc);
  out.cycle_index = 0;
  return out;
}

double run_attack(const AuthModel& auth, std::span<const BeatCycle> cycles,
                  ProbeMode mode) {
  require(!cycles.empty(), ErrorKind::kParameter, "run_attack: empty attack set");
  if (mode == ProbeMode::kMean) {
    return authenticate(auth, mean_cycle(cycles)).accept ? 1.0 : 0.0;
  }
  std::size_t accepted = 0;
  for (const auto& c : cycles) accepted += authenticate(auth, c).accept ? 1 : 0;
  return static_cast<double>(accepted) / static_cast<double>(cycles.size());
}

// ---------------------------------------------------------------------------
// Preparation

std::vector<BeatCycle> cycles_from_waveform(const WaveSignal& sig,
                                            std::string_view subject_id,
                                            const PrepSpec& prep) {
  if (!prep.segment_bandpass) return segment_beats(sig, subject_id, prep.segment);
  return segment_beats(bandpass(sig, prep.band), subject_id, prep.segment);
}

WaveSignal rppg_from_trace(const RgbTrace& trace, const PrepSpec& prep) {
  return bandpass(chrom_extract(trace, prep.chrom), prep.band);
}

std::vector<BeatCycle> cycles_from_trace(const RgbTrace& trace,
                                         std::string_view subject_id,
                                         const PrepSpec& prep) {
  return cycles_from_waveform(rppg_from_trace(trace, prep), subject_id, prep);
}

std::vector<CyclePair> pair_cycles(std::span<const BeatCycle> rppg,
                                   std::span<const BeatCycle> ppg,
                                   double max_offset_fraction) {
  require(max_offset_fraction >= 0.0, ErrorKind::kParameter,
          "pair_cycles: offset fraction must be non-negative");
  std::vector<CyclePair> out;
  std::vector<bool> used(ppg.size(), false);
  std::size_t j = 0;  // both inputs are in onset order
  for (const auto& r : rppg) {
    while (j + 1 < ppg.size() &&
           std::abs(ppg[j + 1].onset_s - r.onset_s) <= std::abs(ppg[j].onset_s - r.onset_s))
      ++j;
    if (j >= ppg.size() || used[j]) continue;
    if (std::abs(ppg[j].onset_s - r.onset_s) > max_offset_fraction * ppg[j].duration_s)
      continue;
    used[j] = true;
    out.push_back({r, ppg[j]});
  }
  return out;
}

SubjectCycles prepare_subject(std::string subject_id, const WaveSignal& ppg,
                              const RgbTrace& trace, const ExperimentSpec& spec) {
  SubjectCycles s;
  s.subject_id = std::move(subject_id);
  s.ppg = cycles_from_waveform(ppg, s.subject_id, spec.prep);
  s.rppg = cycles_from_trace(trace, s.subject_id, spec.prep);
  s.rppg_low_fps =
      cycles_from_trace(decimate_trace(trace, spec.low_fps), s.subject_id, spec.prep);
  s.pairs = pair_cycles(s.rppg, s.ppg);
  return s;
}

std::vector<SubjectCycles> prepare_subjects(
    std::span<const SyntheticSubject> cohort, const ExperimentSpec& spec) {
  std::vector<SubjectCycles> out;
  out.reserve(cohort.size());
  for (const auto& subj : cohort)
    out.push_back(prepare_subject(subj.subject_id, subj.ppg,
                                  render_trace(subj.rppg), spec));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.subject_id < b.subject_id;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Protocol

void ExperimentSpec::validate() const {
  require(n_subjects >= 2, ErrorKind::kParameter,
          "experiment: need at least 2 subjects");
  require(sigr_folds >= 2, ErrorKind::kParameter,
          "experiment: need at least 2 restoration folds");
  require(low_fps > 0.0, ErrorKind::kParameter, "experiment: low_fps must be positive");
  const double nyquist =
      0.5 * std::min({synth.ppg_rate_hz, synth.rppg_rate_hz, low_fps});
  require(prep.band.low_hz > 0.0 && prep.band.low_hz < prep.band.high_hz &&
              prep.band.high_hz < nyquist,
          ErrorKind::kParameter,
          "experiment: band-pass needs 0 < low_hz < high_hz < " + format_double(nyquist));
  const SegmentOptions& seg = prep.segment;
  require(seg.min_cycle_s > 0.0 && seg.min_cycle_s < seg.max_cycle_s, ErrorKind::kParameter,
          "experiment: need 0 < min_cycle_s < max_cycle_s");
  require(seg.min_rate_hz > 0.0 && seg.min_rate_hz < seg.max_rate_hz, ErrorKind::kParameter,
          "experiment: need 0 < min_rate_hz < max_rate_hz");
  require(seg.valley_guard_fraction > 0.0 && seg.valley_guard_fraction < 1.0,
          ErrorKind::kParameter, "experiment: valley_guard_fraction must lie in (0, 1)");
  synth.validate();
  savgol.validate();
  sigr.validate();
  auth.validate();
}

SigrModel train_fold_model(std::span<const SubjectCycles> subjects, int fold,
                           const ExperimentSpec& spec) {
  std::vector<CyclePair> pairs;
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    if (fold_of(i, spec.sigr_folds) == fold) continue;
    pairs.insert(pairs.end(), subjects[i].pairs.begin(), subjects[i].pairs.end());
  }
  TrainSpec ts = spec.sigr;
  ts.rng_seed = spec.sigr.rng_seed + static_cast<std::uint64_t>(fold);
  return train_sigr(pairs, ts);
}

AuthSpec victim_auth_spec(const ExperimentSpec& spec, std::size_t v) {
  AuthSpec as = spec.auth;
  as.seed = spec.auth.seed + v;
  return as;
}

AuthDataset victim_dataset(std::span<const SubjectCycles> subjects, std::size_t v,
                           const ExperimentSpec& spec) {
  require(v < subjects.size(), ErrorKind::kParameter, "victim index out of range");
  std::vector<BeatCycle> others;
  for (std::size_t o = 0; o < subjects.size(); ++o)
    if (o != v) others.insert(others.end(), subjects[o].ppg.begin(), subjects[o].ppg.end());
  return AuthDataset::split(subjects[v].ppg, others, victim_auth_spec(spec, v));
}

AuthModel train_victim_auth(std::span<const SubjectCycles> subjects, std::size_t v,
                            const ExperimentSpec& spec) {
  const AuthSpec as = victim_auth_spec(spec, v);
  const AuthDataset data = victim_dataset(subjects, v, spec);
  AuthModel auth = train_auth(data, as);
  calibrate(auth, data.victim_test, data.other_test, as.target_eer);
  return auth;
}

namespace {

std::vector<std::array<double, FiducialFeatures::kCount>> feature_rows(
    std::span<const BeatCycle> cycles) {
  std::vector<std::array<double, FiducialFeatures::kCount>> rows;
  for (const auto& c : cycles) {
    try {
      rows.push_back(extract_features(c).values());
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kFeatureExtraction) throw;
    }
  }
  return rows;
}

std::array<double, FiducialFeatures::kCount> ks_per_feature(
    std::span<const BeatCycle> a, std::span<const BeatCycle> b) {
  std::array<double, FiducialFeatures::kCount> out;
  out.fill(std::numeric_limits<double>::quiet_NaN());
  const auto ra = feature_rows(a), rb = feature_rows(b);
  if (ra.empty() || rb.empty()) return out;
  std::vector<double> xa(ra.size()), xb(rb.size());
  for (std::size_t f = 0; f < FiducialFeatures::kCount; ++f) {
    for (std::size_t i = 0; i < ra.size(); ++i) xa[i] = ra[i][f];
    for (std::size_t i = 0; i < rb.size(); ++i) xb[i] = rb[i][f];
    out[f] = ks_statistic(xa, xb);
  }
  return out;
}

std::vector<BeatCycle> restore_each(const Generator& gen,
                                    std::span<const BeatCycle> cycles,
                                    const SavGolSpec& savgol) {
  std::vector<BeatCycle> out;
  out.reserve(cycles.size());
  for (const auto& c : cycles) out.push_back(restore(gen, std::span(&c, 1), savgol));
  return out;
}

}  // namespace

AttackReport run_protocol(std::span<const SubjectCycles> subjects,
                          const ExperimentSpec& spec, const ModelStore& store,
                          const ProgressFn& progress) {
  spec.validate();
  require(subjects.size() >= 2, ErrorKind::kParameter,
          "protocol: need at least 2 subjects");
  for (std::size_t i = 1; i < subjects.size(); ++i) {
    require(subjects[i - 1].subject_id < subjects[i].subject_id,
            ErrorKind::kParameter,
            "protocol: subjects must be sorted by unique id");
  }
  auto note = [&](const std::string& msg) {
    if (progress) progress(msg);
  };
  const int folds = std::min<int>(spec.sigr_folds, static_cast<int>(subjects.size()));

  std::vector<SigrModel> models;
  for (int f = 0; f < folds; ++f) {
    std::optional<SigrModel> m;
    if (store.load_sigr) m = store.load_sigr(f);
    if (!m) {
      note("training restoration model for fold " + std::to_string(f));
      ExperimentSpec fs = spec;
      fs.sigr_folds = folds;
      m = train_fold_model(subjects, f, fs);
      if (store.save_sigr) store.save_sigr(f, *m);
    }
    models.push_back(std::move(*m));
  }

  AttackReport report;
  for (std::size_t v = 0; v < subjects.size(); ++v) {
    const SubjectCycles& victim = subjects[v];
    require(!victim.ppg.empty() && !victim.rppg.empty() &&
                !victim.rppg_low_fps.empty(),
            ErrorKind::kDataValidity,
            "protocol: subject " + victim.subject_id + " has no usable cycles");
    const AuthDataset data = victim_dataset(subjects, v, spec);
    std::optional<AuthModel> auth;
    if (store.load_auth) auth = store.load_auth(victim.subject_id);
    if (!auth) {
      note("training authenticator for " + victim.subject_id);
      auth = train_victim_auth(subjects, v, spec);
      if (store.save_auth) store.save_auth(victim.subject_id, *auth);
    }

    VictimResult r;
    r.subject_id = victim.subject_id;
    r.fold = fold_of(v, folds);
    r.eer = auth->eer;
    r.threshold = auth->threshold;
    r.noise_sigma = auth->noise_sigma;
    const Generator& gen = models[static_cast<std::size_t>(r.fold)].generator;

    const auto restored = restore_each(gen, victim.rppg, spec.savgol);
    const BeatCycle mean_restored = restore(gen, victim.rppg, spec.savgol);
    auto far = [&](AttackKind k) -> double& {
      return r.far[static_cast<std::size_t>(k)];
    };
    far(AttackKind::kRandom) = run_attack(*auth, data.other_test, ProbeMode::kSingle);
    far(AttackKind::kRppg) = run_attack(*auth, victim.rppg, ProbeMode::kSingle);
    far(AttackKind::kSigr) = run_attack(*auth, restored, ProbeMode::kSingle);
    far(AttackKind::kMeanRppg) = run_attack(*auth, victim.rppg, ProbeMode::kMean);
    far(AttackKind::kMeanSigr) =
        run_attack(*auth, std::span(&mean_restored, 1), ProbeMode::kSingle);

    r.far_rppg_low_fps = run_attack(*auth, victim.rppg_low_fps, ProbeMode::kSingle);
    r.far_sigr_low_fps = run_attack(
        *auth, restore_each(gen, victim.rppg_low_fps, spec.savgol), ProbeMode::kSingle);

    double pr = 0.0, ps = 0.0;
    for (const auto& p : victim.pairs) {
      pr += pearson(p.rppg.samples, p.ppg.samples);
      const BeatCycle rc = restore(gen, std::span(&p.rppg, 1), spec.savgol);
      ps += pearson(rc.samples, p.ppg.samples);
    }
    r.n_pairs = victim.pairs.size();
    if (r.n_pairs > 0) {
      r.pearson_rppg = pr / static_cast<double>(r.n_pairs);
      r.pearson_sigr = ps / static_cast<double>(r.n_pairs);
    }
    r.ks_rppg = ks_per_feature(victim.rppg, victim.ppg);
    r.ks_sigr = ks_per_feature(restored, victim.ppg);
    note(victim.subject_id + ": eer " + format_double(r.eer) + " far rppg " +
         format_double(far(AttackKind::kRppg)) + " sigr " +
         format_double(far(AttackKind::kSigr)));
    report.victims.push_back(std::move(r));
  }
  return report;
}

double AttackReport::mean_far(AttackKind kind) const {
  require(!victims.empty(), ErrorKind::kParameter, "report: no victims");
  double s = 0.0;
  for (const auto& v : victims) s += v.far[static_cast<std::size_t>(kind)];
  return s / static_cast<double>(victims.size());
}

double AttackReport::mean_of(double VictimResult::*field) const {
  require(!victims.empty(), ErrorKind::kParameter, "report: no victims");
  double s = 0.0;
  for (const auto& v : victims) s += v.*field;
  return s / static_cast<double>(victims.size());
}

std::array<double, FiducialFeatures::kCount> AttackReport::mean_ks(
    bool restored) const {
  require(!victims.empty(), ErrorKind::kParameter, "report: no victims");
  std::array<double, FiducialFeatures::kCount> out{};
  for (std::size_t f = 0; f < out.size(); ++f) {
    double s = 0.0;
    int n = 0;
    for (const auto& v : victims) {
      const double x = restored ? v.ks_sigr[f] : v.ks_rppg[f];
      if (std::isfinite(x)) {
        s += x;
        ++n;
      }
    }
    out[f] = n > 0 ? s / n : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Report

namespace {

std::string fixed(double v, int digits = 4) {
  if (!std::isfinite(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

void emit_report(const AttackReport& report, const std::filesystem::path& dir) {
  require(!report.victims.empty(), ErrorKind::kParameter,
          "emit_report: report has no victims");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::kIo, "cannot create " + dir.string() + ": " + ec.message());

  const auto& names = FiducialFeatures::names();
  std::ostringstream csv;
  csv << "subject_id,fold,eer,threshold,noise_sigma";
  for (std::size_t k = 0; k < kAttackKinds; ++k)
    csv << ",far_" << attack_name(static_cast<AttackKind>(k));
  csv << ",far_rppg_low_fps,far_sigr_low_fps,pearson_rppg,pearson_sigr,n_pairs";
  for (const auto& n : names) csv << ",ks_rppg_" << n;
  for (const auto& n : names) csv << ",ks_sigr_" << n;
  csv << '\n';
  auto row = [&](const std::string& id, const std::string& fold, double eer,
                 double thr, double sigma, const std::array<double, kAttackKinds>& far,
                 double rl, double sl, double prr, double psr, const std::string& np,
                 const std::array<double, FiducialFeatures::kCount>& kr,
                 const std::array<double, FiducialFeatures::kCount>& ks) {
    csv << id << ',' << fold << ',' << format_double(eer) << ',' << format_double(thr)
        << ',' << format_double(sigma);
    for (double f : far) csv << ',' << format_double(f);
    csv << ',' << format_double(rl) << ',' << format_double(sl) << ','
        << format_double(prr) << ',' << format_double(psr) << ',' << np;
    for (double x : kr) csv << ',' << format_double(x);
    for (double x : ks) csv << ',' << format_double(x);
    csv << '\n';
  };
  for (const auto& v : report.victims) {
    row(v.subject_id, std::to_string(v.fold), v.eer, v.threshold, v.noise_sigma,
        v.far, v.far_rppg_low_fps, v.far_sigr_low_fps, v.pearson_rppg,
        v.pearson_sigr, std::to_string(v.n_pairs), v.ks_rppg, v.ks_sigr);
  }
  std::array<double, kAttackKinds> mfar{};
  for (std::size_t k = 0; k < kAttackKinds; ++k)
    mfar[k] = report.mean_far(static_cast<AttackKind>(k));
  const auto mks_r = report.mean_ks(false), mks_s = report.mean_ks(true);
  row("mean", "", report.mean_of(&VictimResult::eer),
      report.mean_of(&VictimResult::threshold),
      report.mean_of(&VictimResult::noise_sigma), mfar,
      report.mean_of(&VictimResult::far_rppg_low_fps),
      report.mean_of(&VictimResult::far_sigr_low_fps),
      report.mean_of(&VictimResult::pearson_rppg),
      report.mean_of(&VictimResult::pearson_sigr), "", mks_r, mks_s);

  std::ostringstream txt;
  txt << "Spoofing attack results (" << report.victims.size() << " victims)\n\n";
  txt << "victim       eer     random  rppg    sigr    mean_rppg mean_sigr\n";
  for (const auto& v : report.victims) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-12s %-7s %-7s %-7s %-7s %-9s %s\n",
                  v.subject_id.c_str(), fixed(v.eer).c_str(),
                  fixed(v.far[0]).c_str(), fixed(v.far[1]).c_str(),
                  fixed(v.far[2]).c_str(), fixed(v.far[3]).c_str(),
                  fixed(v.far[4]).c_str());
    txt << line;
  }
  {
    char line[160];
    std::snprintf(line, sizeof(line), "%-12s %-7s %-7s %-7s %-7s %-9s %s\n", "mean",
                  fixed(report.mean_of(&VictimResult::eer)).c_str(),
                  fixed(mfar[0]).c_str(), fixed(mfar[1]).c_str(),
                  fixed(mfar[2]).c_str(), fixed(mfar[3]).c_str(),
                  fixed(mfar[4]).c_str());
    txt << line;
  }
  txt << "\nLow frame rate single-cycle FAR: rppg "
      << fixed(report.mean_of(&VictimResult::far_rppg_low_fps)) << ", sigr "
      << fixed(report.mean_of(&VictimResult::far_sigr_low_fps)) << '\n';
  txt << "Mean Pearson vs reference: rppg "
      << fixed(report.mean_of(&VictimResult::pearson_rppg)) << ", restored "
      << fixed(report.mean_of(&VictimResult::pearson_sigr)) << '\n';
  txt << "\nMean KS statistic per feature (rppg / restored)\n";
  for (std::size_t f = 0; f < names.size(); ++f) {
    char line[96];
    std::snprintf(line, sizeof(line), "  %-12s %s / %s\n",
                  std::string(names[f]).c_str(), fixed(mks_r[f]).c_str(),
                  fixed(mks_s[f]).c_str());
    txt << line;
  }
  txt << "\nsingle-cycle attacks score each cycle; mean attacks average all of a "
         "victim's cycles into one probe.\n";

  const std::string csv_s = csv.str(), txt_s = txt.str();
  std::ostringstream man;
  for (const auto& [k, v] : report.metadata) man << k << '=' << v << '\n';
  man << "report_csv_fnv1a64=" << hex64(fnv1a64(csv_s)) << '\n';
  man << "report_txt_fnv1a64=" << hex64(fnv1a64(txt_s)) << '\n';
  write_file(dir / "report.csv", csv_s);
  write_file(dir / "report.txt", txt_s);
  write_file(dir / "manifest.txt", man.str());
}

}  // namespace ppgspoof
