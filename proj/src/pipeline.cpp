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

#include "pipeline.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "errors.hpp"
#include "serialize.hpp"

namespace ppgspoof {

namespace fs = std::filesystem;

namespace {

void say(const LogFn& log, std::string_view msg) {
  if (log) log(msg);
}

std::vector<fs::path> list_csv(const fs::path& dir) {
  if (!fs::is_directory(dir))
    fail(ErrorKind::kDependency, "missing input directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

void make_dirs(const fs::path& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::kIo, "cannot create " + dir.string() + ": " + ec.message());
}

void require_file(const fs::path& p, std::string_view what) {
  if (!fs::is_regular_file(p))
    fail(ErrorKind::kDependency,
         "missing " + std::string(what) + ": " + p.string());
}

void check_unique_stems(const std::vector<fs::path>& files) {
  std::set<std::string> seen;
  for (const auto& f : files) {
    const auto id = subject_id_from_path(f);
    require(seen.insert(id).second, ErrorKind::kParameter,
            "subject id collision: two inputs named '" + id + "'");
  }
}

int fold_count(const PipelineConfig& cfg, std::size_t n_subjects) {
  return std::min<int>(cfg.experiment.sigr_folds, static_cast<int>(n_subjects));
}

ExperimentSpec spec_for(const PipelineConfig& cfg, std::size_t n_subjects) {
  ExperimentSpec spec = cfg.experiment;
  spec.sigr_folds = fold_count(cfg, n_subjects);
  return spec;
}

std::vector<SubjectCycles> load_subjects(const PipelineConfig& cfg, const LogFn& log) {
  const auto ids = list_subjects(cfg);
  require(ids.size() >= 2, ErrorKind::kDependency,
          "need reference PPG files for at least 2 subjects in " + cfg.paths.ppg_dir);
  std::vector<SubjectCycles> out;
  for (const auto& id : ids) {
    const fs::path ppg_path = fs::path(cfg.paths.ppg_dir) / (id + ".csv");
    const fs::path trace_path = fs::path(cfg.paths.traces_dir) / (id + ".csv");
    require_file(trace_path, "trace for subject " + id);
    const WaveSignal ppg = read_waveform_csv(ppg_path, SignalLabel::kPpg);
    const RgbTrace trace = read_trace_csv(trace_path, cfg.trace);
    out.push_back(prepare_subject(id, ppg, trace, cfg.experiment));
    say(log, id + ": " + std::to_string(out.back().ppg.size()) + " reference cycles, " +
                 std::to_string(out.back().rppg.size()) + " rPPG cycles");
  }
  return out;
}

// Subject id -> fold for subjects with a reference file.
std::map<std::string, int> fold_map(const PipelineConfig& cfg) {
  const auto ids = list_subjects(cfg);
  const int folds = fold_count(cfg, ids.size());
  std::map<std::string, int> out;
  for (std::size_t i = 0; i < ids.size(); ++i) out[ids[i]] = fold_of(i, folds);
  return out;
}

// Cycles grouped by subject in order of first appearance.
std::vector<std::pair<std::string, std::vector<BeatCycle>>> group_by_subject(
    std::vector<BeatCycle> cycles) {
  std::vector<std::pair<std::string, std::vector<BeatCycle>>> out;
  std::map<std::string, std::size_t> where;
  for (auto& c : cycles) {
    auto [it, inserted] = where.try_emplace(c.subject_id, out.size());
    if (inserted) out.emplace_back(c.subject_id, std::vector<BeatCycle>{});
    out[it->second].second.push_back(std::move(c));
  }
  return out;
}

TrainSpec fold_train_spec(const ExperimentSpec& spec, int fold) {
  TrainSpec ts = spec.sigr;
  ts.rng_seed = spec.sigr.rng_seed + static_cast<std::uint64_t>(fold);
  return ts;
}

void save_fold(const fs::path& models_dir, int fold, const SigrModel& m) {
  make_dirs(models_dir);
  save_sigr(m, sigr_model_path(models_dir, fold));
  write_loss_history_csv(m.history, models_dir / ("sigr_fold" + std::to_string(fold) + "_loss.csv"));
}

std::string file_hash(const fs::path& p) { return hex64(fnv1a64(read_file(p))); }

}  // namespace

fs::path sigr_model_path(const fs::path& models_dir, int fold) {
  return models_dir / ("sigr_fold" + std::to_string(fold) + ".sigr");
}

fs::path auth_model_path(const fs::path& models_dir, std::string_view subject_id) {
  return models_dir / ("auth_" + std::string(subject_id) + ".auth");
}

std::vector<std::string> list_subjects(const PipelineConfig& cfg) {
  const auto files = list_csv(cfg.paths.ppg_dir);
  check_unique_stems(files);
  std::vector<std::string> ids;
  for (const auto& f : files) ids.push_back(subject_id_from_path(f));
  return ids;
}

// ---------------------------------------------------------------------------

StageResult stage_synth(const PipelineConfig& cfg, const LogFn& log) {
  const auto cohort = make_synthetic_cohort(cfg.experiment.n_subjects, cfg.experiment.synth);
  make_dirs(cfg.paths.traces_dir);
  make_dirs(cfg.paths.ppg_dir);
  StageResult res;
  for (const auto& s : cohort) {
    const fs::path tp = fs::path(cfg.paths.traces_dir) / (s.subject_id + ".csv");
    const fs::path pp = fs::path(cfg.paths.ppg_dir) / (s.subject_id + ".csv");
    write_trace_csv(render_trace(s.rppg), tp);
    write_waveform_csv(s.ppg, pp);
    res.written.push_back(tp);
    res.written.push_back(pp);
    say(log, "wrote " + s.subject_id);
  }
  res.summary = std::to_string(cohort.size()) + " synthetic subjects";
  return res;
}

StageResult stage_extract(const PipelineConfig& cfg, std::vector<fs::path> inputs,
                          const fs::path& out_dir, const LogFn& log) {
  if (inputs.empty()) inputs = list_csv(cfg.paths.traces_dir);
  check_unique_stems(inputs);
  make_dirs(out_dir);
  StageResult res;
  for (const auto& in : inputs) {
    try {
      const RgbTrace trace = read_trace_csv(in, cfg.trace);
      const WaveSignal sig = rppg_from_trace(trace, cfg.experiment.prep);
      const fs::path out = out_dir / (subject_id_from_path(in) + ".csv");
      write_waveform_csv(sig, out);
      res.written.push_back(out);
      say(log, "extracted " + in.string());
    } catch (const Error& e) {
      res.failures.push_back(std::string(error_kind_name(e.kind())) + ": " + e.what());
      say(log, std::string("error: ") + e.what());
    }
  }
  res.summary = std::to_string(res.written.size()) + " of " +
                std::to_string(inputs.size()) + " traces extracted";
  return res;
}

StageResult stage_segment(const PipelineConfig& cfg, std::vector<fs::path> inputs,
                          const fs::path& out_archive, std::string_view label,
                          const LogFn& log) {
  const auto lab = parse_label(label);
  require(lab.has_value(), ErrorKind::kParameter,
          "segment: unknown label '" + std::string(label) + "'");
  if (inputs.empty()) inputs = list_csv(cfg.paths.rppg_dir);
  check_unique_stems(inputs);
  StageResult res;
  std::vector<BeatCycle> all;
  for (const auto& in : inputs) {
    const std::string id = subject_id_from_path(in);
    try {
      const WaveSignal sig = read_waveform_csv(in, *lab);
      if (sig.duration_s() < 3.0) {
        res.warnings.push_back(in.string() + ": shorter than 3 s, skipped");
        say(log, "warning: " + res.warnings.back());
        continue;
      }
      auto cycles = cycles_from_waveform(sig, id, cfg.experiment.prep);
      if (cycles.empty()) {
        res.warnings.push_back(in.string() + ": no cycles found");
        say(log, "warning: " + res.warnings.back());
      }
      say(log, id + ": " + std::to_string(cycles.size()) + " cycles");
      all.insert(all.end(), std::make_move_iterator(cycles.begin()),
                 std::make_move_iterator(cycles.end()));
    } catch (const Error& e) {
      res.failures.push_back(std::string(error_kind_name(e.kind())) + ": " + e.what());
      say(log, std::string("error: ") + e.what());
    }
  }
  make_dirs(out_archive.parent_path());
  write_cycle_archive(all, out_archive);
  res.written.push_back(out_archive);
  res.summary = std::to_string(all.size()) + " cycles from " +
                std::to_string(inputs.size()) + " files";
  return res;
}

StageResult stage_train_restore(const PipelineConfig& cfg, const fs::path& models_dir,
                                std::optional<int> only_fold, const LogFn& log) {
  const auto subjects = load_subjects(cfg, log);
  const ExperimentSpec spec = spec_for(cfg, subjects.size());
  if (only_fold) {
    require(*only_fold >= 0 && *only_fold < spec.sigr_folds, ErrorKind::kParameter,
            "train-restore: fold out of range");
  }
  StageResult res;
  for (int f = 0; f < spec.sigr_folds; ++f) {
    if (only_fold && *only_fold != f) continue;
    say(log, "training restoration model for fold " + std::to_string(f));
    const SigrModel m = train_fold_model(subjects, f, spec);
    save_fold(models_dir, f, m);
    res.written.push_back(sigr_model_path(models_dir, f));
    const auto& last = m.history.back();
    say(log, "fold " + std::to_string(f) + ": " + std::to_string(m.history.size()) +
                 " steps, final rec_l1 " + format_double(last.rec_l1));
  }
  res.summary = std::to_string(res.written.size()) + " restoration models";
  return res;
}

StageResult stage_restore(const PipelineConfig& cfg, const fs::path& in_archive,
                          const fs::path& out_archive,
                          const std::optional<fs::path>& model, bool mean,
                          const LogFn& log) {
  require_file(in_archive, "cycle archive");
  auto groups = group_by_subject(read_cycle_archive(in_archive));
  std::optional<SigrModel> fixed;
  if (model) {
    require_file(*model, "restoration model");
    fixed = load_sigr(*model);
  }
  std::map<std::string, int> folds;
  if (!fixed) folds = fold_map(cfg);
  const fs::path models_dir = cfg.paths.models_dir;
  std::map<int, SigrModel> cache;
  std::vector<BeatCycle> out;
  for (auto& [id, cycles] : groups) {
    const SigrModel* m = nullptr;
    if (fixed) {
      m = &*fixed;
    } else {
      const auto it = folds.find(id);
      require(it != folds.end(), ErrorKind::kDependency,
              "restore: no reference PPG file for subject '" + id +
                  "', cannot pick its fold model");
      if (!cache.count(it->second)) {
        const fs::path p = sigr_model_path(models_dir, it->second);
        require_file(p, "restoration model");
        cache.emplace(it->second, load_sigr(p));
      }
      m = &cache.at(it->second);
    }
    if (mean) {
      out.push_back(restore(*m, cycles, cfg.experiment.savgol));
    } else {
      for (const auto& c : cycles) out.push_back(restore(*m, std::span(&c, 1), cfg.experiment.savgol));
    }
    say(log, id + ": restored " + std::to_string(cycles.size()) + " cycles");
  }
  make_dirs(out_archive.parent_path());
  write_cycle_archive(out, out_archive);
  StageResult res;
  res.written.push_back(out_archive);
  res.summary = std::to_string(out.size()) + " restored cycles";
  return res;
}

StageResult stage_train_auth(const PipelineConfig& cfg, const fs::path& models_dir,
                             std::optional<std::string> only_subject, const LogFn& log) {
  const auto subjects = load_subjects(cfg, log);
  const ExperimentSpec spec = spec_for(cfg, subjects.size());
  StageResult res;
  bool found = !only_subject;
  for (std::size_t v = 0; v < subjects.size(); ++v) {
    if (only_subject && subjects[v].subject_id != *only_subject) continue;
    found = true;
    say(log, "training authenticator for " + subjects[v].subject_id);
    const AuthModel m = train_victim_auth(subjects, v, spec);
    make_dirs(models_dir);
    const fs::path p = auth_model_path(models_dir, subjects[v].subject_id);
    save_auth(m, p);
    res.written.push_back(p);
    say(log, subjects[v].subject_id + ": calibrated EER " + format_double(m.eer) +
                 ", noise sigma " + format_double(m.noise_sigma));
  }
  require(found, ErrorKind::kParameter, "train-auth: unknown subject '" +
                                            only_subject.value_or("") + "'");
  res.summary = std::to_string(res.written.size()) + " authenticators";
  return res;
}

StageResult stage_attack(const PipelineConfig& cfg, const fs::path& in_archive,
                         const fs::path& out_log,
                         const std::optional<fs::path>& auth_model, bool mean,
                         const LogFn& log) {
  require_file(in_archive, "cycle archive");
  const auto groups = group_by_subject(read_cycle_archive(in_archive));
  std::optional<AuthModel> fixed;
  if (auth_model) {
    require_file(*auth_model, "authenticator model");
    fixed = load_auth(*auth_model);
  }
  std::vector<DecisionRow> rows;
  StageResult res;
  double far_sum = 0.0;
  for (const auto& [id, cycles] : groups) {
    AuthModel loaded;
    if (!fixed) {
      const fs::path p = auth_model_path(cfg.paths.models_dir, id);
      require_file(p, "authenticator model");
      loaded = load_auth(p);
    }
    const AuthModel& auth = fixed ? *fixed : loaded;
    std::size_t accepted = 0, probes = 0;
    auto decide = [&](const BeatCycle& c) {
      const Decision d = authenticate(auth, c);
      rows.push_back({c.subject_id, c.cycle_index, c.source_label, d.score, d.accept});
      accepted += d.accept ? 1 : 0;
      ++probes;
    };
    if (mean) decide(mean_cycle(cycles));
    else for (const auto& c : cycles) decide(c);
    const double far = static_cast<double>(accepted) / static_cast<double>(probes);
    far_sum += far;
    say(log, id + ": FAR " + format_double(far) + " over " + std::to_string(probes) +
                 (mean ? " mean probe" : " cycles"));
  }
  make_dirs(out_log.parent_path());
  write_decision_log(rows, out_log);
  res.written.push_back(out_log);
  res.summary = "mean FAR " +
                format_double(groups.empty() ? 0.0 : far_sum / static_cast<double>(groups.size())) +
                " over " + std::to_string(groups.size()) + " subjects";
  return res;
}

StageResult stage_report(const PipelineConfig& cfg, const fs::path& models_dir,
                         const fs::path& out_dir, const LogFn& log) {
  const auto subjects = load_subjects(cfg, log);
  const ExperimentSpec spec = spec_for(cfg, subjects.size());

  ModelStore store;
  store.load_sigr = [&](int fold) -> std::optional<SigrModel> {
    const fs::path p = sigr_model_path(models_dir, fold);
    if (!fs::exists(p)) return std::nullopt;
    SigrModel m = load_sigr(p);
    require(m.spec.to_key_values() == fold_train_spec(spec, fold).to_key_values(),
            ErrorKind::kDependency,
            p.string() + " was trained with different settings; remove it to retrain");
    say(log, "using " + p.string());
    return m;
  };
  store.save_sigr = [&](int fold, const SigrModel& m) { save_fold(models_dir, fold, m); };
  store.load_auth = [&](const std::string& id) -> std::optional<AuthModel> {
    const fs::path p = auth_model_path(models_dir, id);
    if (!fs::exists(p)) return std::nullopt;
    AuthModel m = load_auth(p);
    const auto it = std::find_if(subjects.begin(), subjects.end(),
                                 [&](const auto& s) { return s.subject_id == id; });
    const auto v = static_cast<std::size_t>(it - subjects.begin());
    require(m.calibrated() &&
                m.spec.to_key_values() == victim_auth_spec(spec, v).to_key_values(),
            ErrorKind::kDependency,
            p.string() + " was trained with different settings; remove it to retrain");
    say(log, "using " + p.string());
    return m;
  };
  store.save_auth = [&](const std::string& id, const AuthModel& m) {
    make_dirs(models_dir);
    save_auth(m, auth_model_path(models_dir, id));
  };

  AttackReport report = run_protocol(subjects, spec, store, [&](const std::string& m) { say(log, m); });

  auto& md = report.metadata;
  md.emplace_back("config_hash", cfg.hash());
  md.emplace_back("rng_seed", std::to_string(cfg.rng_seed));
  md.emplace_back("synth_seed", std::to_string(spec.synth.rng_seed));
  md.emplace_back("sigr_seed", std::to_string(spec.sigr.rng_seed));
  md.emplace_back("auth_seed", std::to_string(spec.auth.seed));
  md.emplace_back("n_subjects", std::to_string(subjects.size()));
  md.emplace_back("sigr_folds", std::to_string(spec.sigr_folds));
  std::string assignment;
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    if (!assignment.empty()) assignment += ' ';
    assignment += subjects[i].subject_id + ':' + std::to_string(fold_of(i, spec.sigr_folds));
  }
  md.emplace_back("fold_assignment", assignment);
  md.emplace_back("auth_split",
                  "per-cycle, victim train fraction " + format_double(spec.auth.victim_train_fraction) +
                      ", other train fraction " + format_double(spec.auth.other_train_fraction));
  md.emplace_back("attack_semantics",
                  "rppg and sigr score single cycles; mean_rppg and mean_sigr average all "
                  "of a victim's cycles into one probe");
  md.emplace_back("low_fps", format_double(spec.low_fps));
  for (int f = 0; f < spec.sigr_folds; ++f) {
    const fs::path p = sigr_model_path(models_dir, f);
    md.emplace_back(p.filename().string() + "_fnv1a64", file_hash(p));
  }
  for (const auto& s : subjects) {
    const fs::path p = auth_model_path(models_dir, s.subject_id);
    md.emplace_back(p.filename().string() + "_fnv1a64", file_hash(p));
  }
  emit_report(report, out_dir);
  StageResult res;
  for (const char* name : {"report.csv", "report.txt", "manifest.txt"})
    res.written.push_back(out_dir / name);
  res.summary = "mean FAR random " + format_double(report.mean_far(AttackKind::kRandom)) +
                " rppg " + format_double(report.mean_far(AttackKind::kRppg)) + " sigr " +
                format_double(report.mean_far(AttackKind::kSigr)) + " mean_sigr " +
                format_double(report.mean_far(AttackKind::kMeanSigr));
  return res;
}

}  // namespace ppgspoof
