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

#include "ppgspoof/ppgspoof.h"

#include <cstring>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "errors.hpp"
#include "metrics.hpp"
#include "pipeline.hpp"

using namespace ppgspoof;

struct pps_config {
  PipelineConfig cfg;
};
struct pps_signal {
  WaveSignal sig;
};
struct pps_trace {
  RgbTrace trace;
};
struct pps_cycle_set {
  std::vector<BeatCycle> cycles;
};
struct pps_sigr {
  SigrModel model;
};
struct pps_auth {
  AuthModel model;
};

namespace {

thread_local std::string g_last_error;

pps_status set_error(pps_status s, const char* msg) {
  g_last_error = msg;
  return s;
}

template <class F>
pps_status guard(F&& f) noexcept {
  try {
    f();
    return PPS_OK;
  } catch (const Error& e) {
    return set_error(static_cast<pps_status>(static_cast<int>(e.kind())), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(PPS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(PPS_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(PPS_ERR_INTERNAL, "unknown exception");
  }
}

template <class T>
void need(const T* p, const char* what) {
  require(p != nullptr, ErrorKind::kParameter, std::string(what) + " is NULL");
}

void copy_out(const std::string& s, char* buf, std::size_t cap, std::size_t* needed) {
  if (needed) *needed = s.size() + 1;
  require(buf != nullptr || cap == 0, ErrorKind::kParameter, "buffer is NULL");
  require(cap >= s.size() + 1, ErrorKind::kParameter,
          "buffer too small: need " + std::to_string(s.size() + 1) + " bytes");
  std::memcpy(buf, s.c_str(), s.size() + 1);
}

std::string* path_field(PipelinePaths& p, const char* key) {
  need(key, "key");
  const std::string_view k = key;
  if (k == "traces_dir") return &p.traces_dir;
  if (k == "ppg_dir") return &p.ppg_dir;
  if (k == "rppg_dir") return &p.rppg_dir;
  if (k == "cycles_dir") return &p.cycles_dir;
  if (k == "models_dir") return &p.models_dir;
  if (k == "reports_dir") return &p.reports_dir;
  fail(ErrorKind::kParameter, "unknown path key '" + std::string(k) + "'");
}

template <class T, class... Args>
void emit(T** out, Args&&... args) {
  need(out, "out");
  *out = new T{std::forward<Args>(args)...};
}

LogFn make_log(pps_log_fn log, void* user) {
  if (!log) return {};
  return [log, user](std::string_view msg) {
    const std::string s(msg);
    log(s.c_str(), user);
  };
}

void fill_info(const StageResult& r, pps_stage_info* info) {
  if (!info) return;
  info->written = r.written.size();
  info->warnings = r.warnings.size();
  info->failures = r.failures.size();
  std::memset(info->summary, 0, sizeof info->summary);
  std::strncpy(info->summary, r.summary.c_str(), sizeof info->summary - 1);
}

std::vector<std::filesystem::path> path_list(const char* const* inputs, std::size_t n) {
  require(inputs != nullptr || n == 0, ErrorKind::kParameter, "inputs is NULL");
  std::vector<std::filesystem::path> out;
  for (std::size_t i = 0; i < n; ++i) {
    need(inputs[i], "input path");
    out.emplace_back(inputs[i]);
  }
  return out;
}

std::optional<std::filesystem::path> opt_path(const char* p) {
  if (!p) return std::nullopt;
  return std::filesystem::path(p);
}

const BeatCycle& cycle_at(const pps_cycle_set* set, std::size_t index) {
  need(set, "cycle set");
  require(index < set->cycles.size(), ErrorKind::kParameter, "cycle index out of range");
  return set->cycles[index];
}

}  // namespace

extern "C" {

const char* pps_version(void) { return PPGSPOOF_VERSION; }

const char* pps_last_error(void) { return g_last_error.c_str(); }

const char* pps_status_name(pps_status status) {
  if (status == PPS_OK) return "ok";
  if (status == PPS_ERR_INTERNAL) return "internal";
  if (status >= PPS_ERR_PARAMETER && status <= PPS_ERR_FEATURE_EXTRACTION)
    return error_kind_name(static_cast<ErrorKind>(static_cast<int>(status)));
  return "unknown";
}

// ---- configuration --------------------------------------------------------

pps_status pps_config_default(pps_config** out) {
  return guard([&] { emit(out, PipelineConfig{}); });
}

pps_status pps_config_parse(const char* text, pps_config** out) {
  return guard([&] {
    need(text, "text");
    emit(out, PipelineConfig::parse(text));
  });
}

pps_status pps_config_load(const char* path, pps_config** out) {
  return guard([&] {
    need(path, "path");
    emit(out, PipelineConfig::load(path));
  });
}

void pps_config_free(pps_config* cfg) { delete cfg; }

pps_status pps_config_set_seed(pps_config* cfg, uint64_t seed) {
  return guard([&] {
    need(cfg, "config");
    cfg->cfg.apply_seed(seed);
  });
}

pps_status pps_config_seed(const pps_config* cfg, uint64_t* out) {
  return guard([&] {
    need(cfg, "config");
    need(out, "out");
    *out = cfg->cfg.rng_seed;
  });
}

pps_status pps_config_set_path(pps_config* cfg, const char* key, const char* value) {
  return guard([&] {
    need(cfg, "config");
    need(value, "value");
    *path_field(cfg->cfg.paths, key) = value;
  });
}

pps_status pps_config_get_path(const pps_config* cfg, const char* key, char* buf,
                               size_t cap, size_t* needed) {
  return guard([&] {
    need(cfg, "config");
    PipelinePaths p = cfg->cfg.paths;
    copy_out(*path_field(p, key), buf, cap, needed);
  });
}

pps_status pps_config_hash(const pps_config* cfg, char* buf, size_t cap, size_t* needed) {
  return guard([&] {
    need(cfg, "config");
    copy_out(cfg->cfg.hash(), buf, cap, needed);
  });
}

pps_status pps_config_text(const pps_config* cfg, char* buf, size_t cap, size_t* needed) {
  return guard([&] {
    need(cfg, "config");
    copy_out(cfg->cfg.to_text(), buf, cap, needed);
  });
}

// ---- waveforms ------------------------------------------------------------

pps_status pps_signal_create(const double* samples, size_t n, double rate_hz,
                             pps_signal** out) {
  return guard([&] {
    require(samples != nullptr || n == 0, ErrorKind::kParameter, "samples is NULL");
    emit(out, WaveSignal(std::vector<double>(samples, samples + n), rate_hz));
  });
}

pps_status pps_signal_read_csv(const char* path, pps_signal** out) {
  return guard([&] {
    need(path, "path");
    emit(out, read_waveform_csv(path));
  });
}

pps_status pps_signal_write_csv(const pps_signal* sig, const char* path) {
  return guard([&] {
    need(sig, "signal");
    need(path, "path");
    write_waveform_csv(sig->sig, path);
  });
}

void pps_signal_free(pps_signal* sig) { delete sig; }

size_t pps_signal_length(const pps_signal* sig) { return sig ? sig->sig.size() : 0; }

double pps_signal_rate(const pps_signal* sig) { return sig ? sig->sig.sample_rate_hz() : 0.0; }

pps_status pps_signal_samples(const pps_signal* sig, double* out, size_t cap) {
  return guard([&] {
    need(sig, "signal");
    const auto s = sig->sig.samples();
    const std::size_t n = std::min(cap, s.size());
    require(out != nullptr || n == 0, ErrorKind::kParameter, "out is NULL");
    std::copy_n(s.begin(), n, out);
  });
}

pps_status pps_bandpass(const pps_signal* in, double low_hz, double high_hz,
                        pps_signal** out) {
  return guard([&] {
    need(in, "signal");
    emit(out, bandpass(in->sig, low_hz, high_hz));
  });
}

pps_status pps_savgol(const pps_signal* in, int window_len, int poly_order,
                      pps_signal** out) {
  return guard([&] {
    need(in, "signal");
    emit(out, savgol_smooth(in->sig, SavGolSpec{window_len, poly_order}));
  });
}

pps_status pps_resample(const pps_signal* in, double rate_hz, pps_signal** out) {
  return guard([&] {
    need(in, "signal");
    emit(out, resample(in->sig, rate_hz));
  });
}

pps_status pps_dominant_frequency(const pps_signal* sig, double min_hz, double max_hz,
                                  double* out_hz) {
  return guard([&] {
    need(sig, "signal");
    need(out_hz, "out");
    *out_hz = dominant_frequency(sig->sig, min_hz, max_hz);
  });
}

// ---- traces ---------------------------------------------------------------

pps_status pps_trace_create(const double* rgb, size_t n_frames, double fps,
                            pps_trace** out) {
  return guard([&] {
    require(rgb != nullptr || n_frames == 0, ErrorKind::kParameter, "rgb is NULL");
    RgbTrace t;
    t.frame_rate_hz = fps;
    t.frames.reserve(n_frames);
    for (std::size_t i = 0; i < n_frames; ++i)
      t.frames.push_back({rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]});
    t.validate();
    emit(out, std::move(t));
  });
}

pps_status pps_trace_read_csv(const char* path, int max_gap_frames, pps_trace** out) {
  return guard([&] {
    need(path, "path");
    emit(out, read_trace_csv(path, TracePolicy{max_gap_frames}));
  });
}

pps_status pps_trace_write_csv(const pps_trace* trace, const char* path) {
  return guard([&] {
    need(trace, "trace");
    need(path, "path");
    write_trace_csv(trace->trace, path);
  });
}

void pps_trace_free(pps_trace* trace) { delete trace; }

size_t pps_trace_length(const pps_trace* trace) { return trace ? trace->trace.size() : 0; }

double pps_trace_fps(const pps_trace* trace) { return trace ? trace->trace.frame_rate_hz : 0.0; }

pps_status pps_trace_decimate(const pps_trace* in, double fps, pps_trace** out) {
  return guard([&] {
    need(in, "trace");
    emit(out, decimate_trace(in->trace, fps));
  });
}

pps_status pps_chrom_extract(const pps_trace* trace, double window_seconds,
                             double overlap_fraction, pps_signal** out) {
  return guard([&] {
    need(trace, "trace");
    emit(out, chrom_extract(trace->trace, ChromSpec{window_seconds, overlap_fraction}));
  });
}

// ---- cycles ---------------------------------------------------------------

pps_status pps_segment(const pps_signal* sig, const char* subject_id, pps_cycle_set** out) {
  return guard([&] {
    need(sig, "signal");
    need(subject_id, "subject_id");
    emit(out, segment_beats(sig->sig, subject_id));
  });
}

pps_status pps_cycle_set_read(const char* path, pps_cycle_set** out) {
  return guard([&] {
    need(path, "path");
    emit(out, read_cycle_archive(path));
  });
}

pps_status pps_cycle_set_write(const pps_cycle_set* set, const char* path) {
  return guard([&] {
    need(set, "cycle set");
    need(path, "path");
    write_cycle_archive(set->cycles, path);
  });
}

void pps_cycle_set_free(pps_cycle_set* set) { delete set; }

size_t pps_cycle_set_size(const pps_cycle_set* set) { return set ? set->cycles.size() : 0; }

pps_status pps_cycle_samples(const pps_cycle_set* set, size_t index, double* out) {
  return guard([&] {
    const BeatCycle& c = cycle_at(set, index);
    need(out, "out");
    std::copy(c.samples.begin(), c.samples.end(), out);
  });
}

pps_status pps_cycle_features(const pps_cycle_set* set, size_t index, double* out) {
  return guard([&] {
    const BeatCycle& c = cycle_at(set, index);
    need(out, "out");
    const auto v = extract_features(c).values();
    std::copy(v.begin(), v.end(), out);
  });
}

const char* pps_feature_name(size_t index) {
  const auto& names = FiducialFeatures::names();
  return index < names.size() ? names[index].data() : nullptr;
}

// ---- models ---------------------------------------------------------------

pps_status pps_sigr_load(const char* path, pps_sigr** out) {
  return guard([&] {
    need(path, "path");
    emit(out, load_sigr(path));
  });
}

void pps_sigr_free(pps_sigr* model) { delete model; }

pps_status pps_sigr_restore(const pps_sigr* model, const pps_cycle_set* in, int mean,
                            pps_cycle_set** out) {
  return guard([&] {
    need(model, "model");
    need(in, "cycle set");
    const SavGolSpec savgol;
    std::vector<BeatCycle> res;
    if (mean) {
      res.push_back(restore(model->model, in->cycles, savgol));
    } else {
      for (const auto& c : in->cycles)
        res.push_back(restore(model->model, std::span(&c, 1), savgol));
    }
    emit(out, std::move(res));
  });
}

pps_status pps_auth_load(const char* path, pps_auth** out) {
  return guard([&] {
    need(path, "path");
    emit(out, load_auth(path));
  });
}

void pps_auth_free(pps_auth* model) { delete model; }

pps_status pps_auth_threshold(const pps_auth* model, double* out) {
  return guard([&] {
    need(model, "model");
    need(out, "out");
    require(model->model.calibrated(), ErrorKind::kUsage, "authenticator is not calibrated");
    *out = model->model.threshold;
  });
}

pps_status pps_auth_decide(const pps_auth* model, const double* cycle, double* score,
                           int* accept) {
  return guard([&] {
    need(model, "model");
    need(cycle, "cycle");
    BeatCycle c;
    c.samples.assign(cycle, cycle + kCycleLength);
    c.validate();
    const Decision d = authenticate(model->model, c);
    if (score) *score = d.score;
    if (accept) *accept = d.accept ? 1 : 0;
  });
}

// ---- metrics --------------------------------------------------------------

pps_status pps_ks_statistic(const double* a, size_t na, const double* b, size_t nb,
                            double* out) {
  return guard([&] {
    require((a || na == 0) && (b || nb == 0), ErrorKind::kParameter, "sample is NULL");
    need(out, "out");
    *out = ks_statistic(std::span(a, na), std::span(b, nb));
  });
}

pps_status pps_pearson(const double* x, const double* y, size_t n, double* out) {
  return guard([&] {
    require((x && y) || n == 0, ErrorKind::kParameter, "sample is NULL");
    need(out, "out");
    *out = pearson(std::span(x, n), std::span(y, n));
  });
}

pps_status pps_far_frr_eer(const double* genuine, size_t ng, const double* impostor,
                           size_t ni, double* eer, double* threshold) {
  return guard([&] {
    require((genuine || ng == 0) && (impostor || ni == 0), ErrorKind::kParameter,
            "scores are NULL");
    const EerResult r = far_frr_eer(std::span(genuine, ng), std::span(impostor, ni));
    if (eer) *eer = r.eer;
    if (threshold) *threshold = r.threshold;
  });
}

// ---- stages ---------------------------------------------------------------

pps_status pps_stage_synth(const pps_config* cfg, pps_log_fn log, void* user,
                           pps_stage_info* info) {
  return guard([&] {
    need(cfg, "config");
    fill_info(stage_synth(cfg->cfg, make_log(log, user)), info);
  });
}

pps_status pps_stage_extract(const pps_config* cfg, const char* const* inputs,
                             size_t n_inputs, const char* out_dir, pps_log_fn log,
                             void* user, pps_stage_info* info) {
  return guard([&] {
    need(cfg, "config");
    const std::filesystem::path out = out_dir ? out_dir : cfg->cfg.paths.rppg_dir;
    fill_info(stage_extract(cfg->cfg, path_list(inputs, n_inputs), out, make_log(log, user)),
              info);
  });
}

pps_status pps_stage_segment(const pps_config* cfg, const char* const* inputs,
                             size_t n_inputs, const char* out_archive, const char* label,
                             pps_log_fn log, void* user, pps_stage_info* info) {
  return guard([&] {
    need(cfg, "config");
    const std::filesystem::path out =
        out_archive ? std::filesystem::path(out_archive)
                    : std::filesystem::path(cfg->cfg.paths.cycles_dir) / "cycles.csv";
    fill_info(stage_segment(cfg->cfg, path_list(inputs, n_inputs), out,
                            label ? label : "RPPG", make_log(log, user)),
              info);
  });
}

pps_status pps_stage_train_restore(const pps_config* cfg, const char* models_dir, int fold,
                                   pps_log_fn log, void* user, pps_stage_info* info) {
  return guard([&] {
    need(cfg, "config");
    const std::filesystem::path dir = models_dir ? models_dir : cfg->cfg.paths.models_dir;
    std::optional<int> only;
    if (fold >= 0) only = fold;
    fill_info(stage_train_restore(cfg->cfg, dir, only, make_log(log, user)), info);
  });
}

pps_status pps_stage_restore(const pps_config* cfg, const char* in_archive,
                             const char* out_archive, const char* model_path, int mean,
                             pps_log_fn log, void* user, pps_stage_info* info) {
  return guard([&] {
    need(cfg, "config");
    need(in_archive, "in_archive");
    need(out_archive, "out_archive");
    fill_info(stage_restore(cfg->cfg, in_archive, out_archive, opt_path(model_path),
                            mean != 0, make_log(log, user)),
              info);
  });
}

pps_status pps_stage_train_auth(const pps_config* cfg, const char* models_dir,
                                const char* subject_id, pps_log_fn log, void* user,
                                pps_stage_info* info) {
  return guard([&] {
    need(cfg, "config");
    const std::filesystem::path dir = models_dir ? models_dir : cfg->cfg.paths.models_dir;
    std::optional<std::string> only;
    if (subject_id) only = subject_id;
    fill_info(stage_train_auth(cfg->cfg, dir, only, make_log(log, user)), info);
  });
}

pps_status pps_stage_attack(const pps_config* cfg, const char* in_archive,
                            const char* out_log, const char* auth_path, int mean,
                            pps_log_fn log, void* user, pps_stage_info* info) {
  return guard([&] {
    need(cfg, "config");
    need(in_archive, "in_archive");
    need(out_log, "out_log");
    fill_info(stage_attack(cfg->cfg, in_archive, out_log, opt_path(auth_path), mean != 0,
                           make_log(log, user)),
              info);
  });
}

pps_status pps_stage_report(const pps_config* cfg, const char* models_dir,
                            const char* out_dir, pps_log_fn log, void* user,
                            pps_stage_info* info) {
  return guard([&] {
    need(cfg, "config");
    const std::filesystem::path models = models_dir ? models_dir : cfg->cfg.paths.models_dir;
    const std::filesystem::path out = out_dir ? out_dir : cfg->cfg.paths.reports_dir;
    fill_info(stage_report(cfg->cfg, models, out, make_log(log, user)), info);
  });
}

}  // extern "C"
