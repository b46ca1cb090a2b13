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

#ifndef PPGSPOOF_PPGSPOOF_H
#define PPGSPOOF_PPGSPOOF_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(PPGSPOOF_BUILDING)
#    define PPS_API __declspec(dllexport)
#  else
#    define PPS_API __declspec(dllimport)
#  endif
#else
#  define PPS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every fallible call returns a status. On failure, pps_last_error() holds a
 * one-line message for the calling thread until its next failing call. */
typedef enum pps_status {
  PPS_OK = 0,
  PPS_ERR_PARAMETER = 1,
  PPS_ERR_DATA_VALIDITY = 2,
  PPS_ERR_DEGENERATE_INPUT = 3,
  PPS_ERR_USAGE = 4,
  PPS_ERR_IO = 5,
  PPS_ERR_PARSE = 6,
  PPS_ERR_DEPENDENCY = 7,
  PPS_ERR_CALIBRATION = 8,
  PPS_ERR_TRAINING = 9,
  PPS_ERR_FEATURE_EXTRACTION = 10,
  PPS_ERR_INTERNAL = 99
} pps_status;

#define PPS_CYCLE_LENGTH 64
#define PPS_FEATURE_COUNT 10

PPS_API const char* pps_version(void);
PPS_API const char* pps_last_error(void);
/* snake_case name of a status, e.g. "data_validity"; "unknown" otherwise. */
PPS_API const char* pps_status_name(pps_status status);

typedef struct pps_config pps_config;
typedef struct pps_signal pps_signal;
typedef struct pps_trace pps_trace;
typedef struct pps_cycle_set pps_cycle_set;
typedef struct pps_sigr pps_sigr;
typedef struct pps_auth pps_auth;

/* Copies a string into buf (NUL-terminated). *needed, when non-NULL,
 * receives the full length including the terminator; a short buffer
 * yields PPS_ERR_PARAMETER after filling needed. */

/* ---- configuration ---- */
PPS_API pps_status pps_config_default(pps_config** out);
PPS_API pps_status pps_config_parse(const char* text, pps_config** out);
PPS_API pps_status pps_config_load(const char* path, pps_config** out);
PPS_API void pps_config_free(pps_config* cfg);
/* Re-derives every module seed from `seed`. */
PPS_API pps_status pps_config_set_seed(pps_config* cfg, uint64_t seed);
PPS_API pps_status pps_config_seed(const pps_config* cfg, uint64_t* out);
/* key: traces_dir, ppg_dir, rppg_dir, cycles_dir, models_dir, reports_dir */
PPS_API pps_status pps_config_set_path(pps_config* cfg, const char* key, const char* value);
PPS_API pps_status pps_config_get_path(const pps_config* cfg, const char* key,
                                       char* buf, size_t cap, size_t* needed);
PPS_API pps_status pps_config_hash(const pps_config* cfg, char* buf, size_t cap,
                                   size_t* needed);
PPS_API pps_status pps_config_text(const pps_config* cfg, char* buf, size_t cap,
                                   size_t* needed);

/* ---- waveforms ---- */
PPS_API pps_status pps_signal_create(const double* samples, size_t n, double rate_hz,
                                     pps_signal** out);
PPS_API pps_status pps_signal_read_csv(const char* path, pps_signal** out);
PPS_API pps_status pps_signal_write_csv(const pps_signal* sig, const char* path);
PPS_API void pps_signal_free(pps_signal* sig);
PPS_API size_t pps_signal_length(const pps_signal* sig);
PPS_API double pps_signal_rate(const pps_signal* sig);
/* Copies min(cap, length) samples. */
PPS_API pps_status pps_signal_samples(const pps_signal* sig, double* out, size_t cap);
PPS_API pps_status pps_bandpass(const pps_signal* in, double low_hz, double high_hz,
                                pps_signal** out);
PPS_API pps_status pps_savgol(const pps_signal* in, int window_len, int poly_order,
                              pps_signal** out);
PPS_API pps_status pps_resample(const pps_signal* in, double rate_hz, pps_signal** out);
PPS_API pps_status pps_dominant_frequency(const pps_signal* sig, double min_hz,
                                          double max_hz, double* out_hz);

/* ---- RGB traces ---- */
/* rgb holds n_frames interleaved r,g,b means. */
PPS_API pps_status pps_trace_create(const double* rgb, size_t n_frames, double fps,
                                    pps_trace** out);
/* Gap rows of up to max_gap_frames are interpolated; longer runs fail. */
PPS_API pps_status pps_trace_read_csv(const char* path, int max_gap_frames,
                                      pps_trace** out);
PPS_API pps_status pps_trace_write_csv(const pps_trace* trace, const char* path);
PPS_API void pps_trace_free(pps_trace* trace);
PPS_API size_t pps_trace_length(const pps_trace* trace);
PPS_API double pps_trace_fps(const pps_trace* trace);
PPS_API pps_status pps_trace_decimate(const pps_trace* in, double fps, pps_trace** out);
PPS_API pps_status pps_chrom_extract(const pps_trace* trace, double window_seconds,
                                     double overlap_fraction, pps_signal** out);

/* ---- beat cycles ---- */
PPS_API pps_status pps_segment(const pps_signal* sig, const char* subject_id,
                               pps_cycle_set** out);
PPS_API pps_status pps_cycle_set_read(const char* path, pps_cycle_set** out);
PPS_API pps_status pps_cycle_set_write(const pps_cycle_set* set, const char* path);
PPS_API void pps_cycle_set_free(pps_cycle_set* set);
PPS_API size_t pps_cycle_set_size(const pps_cycle_set* set);
/* out receives PPS_CYCLE_LENGTH samples. */
PPS_API pps_status pps_cycle_samples(const pps_cycle_set* set, size_t index, double* out);
/* out receives PPS_FEATURE_COUNT values in the order of pps_feature_name. */
PPS_API pps_status pps_cycle_features(const pps_cycle_set* set, size_t index, double* out);
PPS_API const char* pps_feature_name(size_t index);

/* ---- models ---- */
PPS_API pps_status pps_sigr_load(const char* path, pps_sigr** out);
PPS_API void pps_sigr_free(pps_sigr* model);
/* mean != 0 averages the whole set into one restored cycle. */
PPS_API pps_status pps_sigr_restore(const pps_sigr* model, const pps_cycle_set* in,
                                    int mean, pps_cycle_set** out);

PPS_API pps_status pps_auth_load(const char* path, pps_auth** out);
PPS_API void pps_auth_free(pps_auth* model);
PPS_API pps_status pps_auth_threshold(const pps_auth* model, double* out);
/* cycle holds PPS_CYCLE_LENGTH samples already normalised to [0, 1]. */
PPS_API pps_status pps_auth_decide(const pps_auth* model, const double* cycle,
                                   double* score, int* accept);

/* ---- metrics ---- */
PPS_API pps_status pps_ks_statistic(const double* a, size_t na, const double* b,
                                    size_t nb, double* out);
PPS_API pps_status pps_pearson(const double* x, const double* y, size_t n, double* out);
PPS_API pps_status pps_far_frr_eer(const double* genuine, size_t ng,
                                   const double* impostor, size_t ni, double* eer,
                                   double* threshold);

/* ---- pipeline stages ---- */
typedef void (*pps_log_fn)(const char* message, void* user);

typedef struct pps_stage_info {
  size_t written;
  size_t warnings;
  size_t failures;
  char summary[256];
} pps_stage_info;

/* Stages read and write the directories named in the config. `log` and
 * `info` may be NULL. Per-file stages keep going past bad files and report
 * them through `info->failures`. */
PPS_API pps_status pps_stage_synth(const pps_config* cfg, pps_log_fn log, void* user,
                                   pps_stage_info* info);
/* n_inputs == 0 scans the configured input directory. */
PPS_API pps_status pps_stage_extract(const pps_config* cfg, const char* const* inputs,
                                     size_t n_inputs, const char* out_dir,
                                     pps_log_fn log, void* user, pps_stage_info* info);
PPS_API pps_status pps_stage_segment(const pps_config* cfg, const char* const* inputs,
                                     size_t n_inputs, const char* out_archive,
                                     const char* label, pps_log_fn log, void* user,
                                     pps_stage_info* info);
/* fold < 0 trains every fold. */
PPS_API pps_status pps_stage_train_restore(const pps_config* cfg, const char* models_dir,
                                           int fold, pps_log_fn log, void* user,
                                           pps_stage_info* info);
/* model_path NULL picks each subject's fold model from the models dir. */
PPS_API pps_status pps_stage_restore(const pps_config* cfg, const char* in_archive,
                                     const char* out_archive, const char* model_path,
                                     int mean, pps_log_fn log, void* user,
                                     pps_stage_info* info);
/* subject_id NULL trains every subject. */
PPS_API pps_status pps_stage_train_auth(const pps_config* cfg, const char* models_dir,
                                        const char* subject_id, pps_log_fn log,
                                        void* user, pps_stage_info* info);
PPS_API pps_status pps_stage_attack(const pps_config* cfg, const char* in_archive,
                                    const char* out_log, const char* auth_path, int mean,
                                    pps_log_fn log, void* user, pps_stage_info* info);
PPS_API pps_status pps_stage_report(const pps_config* cfg, const char* models_dir,
                                    const char* out_dir, pps_log_fn log, void* user,
                                    pps_stage_info* info);

#ifdef __cplusplus
}
#endif

#endif /* PPGSPOOF_PPGSPOOF_H */
