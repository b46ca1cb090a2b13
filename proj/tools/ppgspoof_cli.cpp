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

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ppgspoof/ppgspoof.h"

namespace {

constexpr int kExitPartial = 11;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> inputs;
  std::string archive;
  std::string model;
  std::string models_dir;
  std::string subject;
  std::string label = "RPPG";
  int fold = -1;
  bool mean = false;
  bool quiet = false;
};

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

int report_error(pps_status st) {
  std::fprintf(stderr, "error: %s: %s\n", pps_status_name(st), one_line(pps_last_error()).c_str());
  return static_cast<int>(st);
}

void log_line(const char* msg, void* user) {
  if (!*static_cast<bool*>(user)) std::fprintf(stderr, "%s\n", msg);
}

class Config {
 public:
  ~Config() { pps_config_free(cfg_); }
  pps_status open(const Options& o) {
    pps_status st = o.config.empty() ? pps_config_default(&cfg_)
                                     : pps_config_load(o.config.c_str(), &cfg_);
    if (st == PPS_OK && o.seed) st = pps_config_set_seed(cfg_, *o.seed);
    return st;
  }
  pps_config* get() const { return cfg_; }
  std::string path(const char* key) const {
    char buf[4096];
    return pps_config_get_path(cfg_, key, buf, sizeof buf, nullptr) == PPS_OK ? buf : "";
  }

 private:
  pps_config* cfg_ = nullptr;
};

std::vector<const char*> c_strings(const std::vector<std::string>& v) {
  std::vector<const char*> out;
  for (const auto& s : v) out.push_back(s.c_str());
  return out;
}

const char* or_null(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

std::string join(const std::string& dir, const char* name) {
  return (std::filesystem::path(dir) / name).string();
}

int run(const std::string& cmd, Options& o) {
  Config cfg;
  if (pps_status st = cfg.open(o); st != PPS_OK) return report_error(st);
  char hash[64];
  std::uint64_t seed = 0;
  pps_config_hash(cfg.get(), hash, sizeof hash, nullptr);
  pps_config_seed(cfg.get(), &seed);
  std::printf("config_hash=%s seed=%llu\n", hash, static_cast<unsigned long long>(seed));
  std::fflush(stdout);

  pps_stage_info info{};
  void* user = &o.quiet;
  const auto inputs = c_strings(o.inputs);
  pps_status st = PPS_OK;

  if (cmd == "synth") {
    if (!o.out.empty()) {
      pps_config_set_path(cfg.get(), "traces_dir", join(o.out, "traces").c_str());
      pps_config_set_path(cfg.get(), "ppg_dir", join(o.out, "ppg").c_str());
    }
    st = pps_stage_synth(cfg.get(), log_line, user, &info);
  } else if (cmd == "extract") {
    st = pps_stage_extract(cfg.get(), inputs.data(), inputs.size(), or_null(o.out), log_line,
                           user, &info);
  } else if (cmd == "segment") {
    const std::string dir = o.out.empty() ? cfg.path("cycles_dir") : o.out;
    const std::string archive = join(dir, o.label == "PPG" ? "ppg_cycles.csv" : "cycles.csv");
    st = pps_stage_segment(cfg.get(), inputs.data(), inputs.size(), archive.c_str(),
                           o.label.c_str(), log_line, user, &info);
  } else if (cmd == "train-restore") {
    st = pps_stage_train_restore(cfg.get(), or_null(o.out), o.fold, log_line, user, &info);
  } else if (cmd == "restore") {
    const std::string dir = o.out.empty() ? cfg.path("cycles_dir") : o.out;
    const std::string out = join(dir, o.mean ? "restored_mean.csv" : "restored.csv");
    if (!o.models_dir.empty()) pps_config_set_path(cfg.get(), "models_dir", o.models_dir.c_str());
    st = pps_stage_restore(cfg.get(), o.archive.c_str(), out.c_str(), or_null(o.model),
                           o.mean, log_line, user, &info);
  } else if (cmd == "train-auth") {
    st = pps_stage_train_auth(cfg.get(), or_null(o.out), or_null(o.subject), log_line, user,
                              &info);
  } else if (cmd == "attack") {
    const std::string dir = o.out.empty() ? cfg.path("reports_dir") : o.out;
    const std::string out = join(dir, o.mean ? "decisions_mean.csv" : "decisions.csv");
    if (!o.models_dir.empty()) pps_config_set_path(cfg.get(), "models_dir", o.models_dir.c_str());
    st = pps_stage_attack(cfg.get(), o.archive.c_str(), out.c_str(), or_null(o.model), o.mean,
                          log_line, user, &info);
  } else if (cmd == "report") {
    st = pps_stage_report(cfg.get(), or_null(o.models_dir), or_null(o.out), log_line, user,
                          &info);
  }
  if (st != PPS_OK) return report_error(st);
  std::printf("%s\n", info.summary);
  if (info.failures > 0) {
    std::fprintf(stderr, "error: partial: %zu input(s) failed\n", info.failures);
    return kExitPartial;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Remote-PPG spoofing pipeline"};
  app.set_version_flag("--version", pps_version());
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config, "Config file (key=value with [section] headers)")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "Global seed; overrides the config");
  app.add_option("--out", o.out, "Output directory");
  app.add_flag("-q,--quiet", o.quiet, "Suppress progress lines");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic cohort of traces and reference PPG");
  auto* extract = app.add_subcommand("extract", "Trace CSVs to rPPG waveform CSVs");
  extract->add_option("inputs", o.inputs, "Trace files (default: traces dir)");
  auto* segment = app.add_subcommand("segment", "Waveform CSVs to a beat-cycle archive");
  segment->add_option("inputs", o.inputs, "Waveform files (default: rppg dir)");
  segment->add_option("--label", o.label, "Source label of the inputs")
      ->check(CLI::IsMember({"PPG", "RPPG", "RESTORED"}));
  auto* train_restore = app.add_subcommand("train-restore", "Train the per-fold restoration models");
  train_restore->add_option("--fold", o.fold, "Train only this fold");
  auto* restore = app.add_subcommand("restore", "Restore a cycle archive");
  restore->add_option("archive", o.archive, "Cycle archive")->required();
  restore->add_option("--model", o.model, "Restoration model (default: subject's fold model)");
  restore->add_option("--models", o.models_dir, "Models directory");
  restore->add_flag("--mean", o.mean, "Average each subject's cycles into one restored cycle");
  auto* train_auth = app.add_subcommand("train-auth", "Train and calibrate per-subject authenticators");
  train_auth->add_option("--subject", o.subject, "Train only this subject");
  auto* attack = app.add_subcommand("attack", "Score a cycle archive against authenticators");
  attack->add_option("archive", o.archive, "Cycle archive")->required();
  attack->add_option("--auth", o.model, "Authenticator model (default: per subject)");
  attack->add_option("--models", o.models_dir, "Models directory");
  attack->add_flag("--mean", o.mean, "Submit one averaged probe per subject");
  auto* report = app.add_subcommand("report", "Run the full attack protocol and write the report bundle");
  report->add_option("--models", o.models_dir, "Models directory");
  for (auto* sub : {synth, extract, segment, train_restore, restore, train_auth, attack, report})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: usage: %s\n", one_line(e.what()).c_str());
    return PPS_ERR_USAGE;
  }
  return run(app.get_subcommands().front()->get_name(), o);
}
