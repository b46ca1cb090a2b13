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

#include "config.hpp"

#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include "errors.hpp"
#include "serialize.hpp"

namespace ppgspoof {

namespace {

struct Field {
  std::string section;
  std::string key;
  std::function<std::string(const PipelineConfig&)> get;
  std::function<void(PipelineConfig&, std::string_view)> set;
};

template <class Ref>
Field real(std::string section, std::string key, Ref ref) {
  return {std::move(section), key,
          [ref](const PipelineConfig& c) { return format_double(ref(const_cast<PipelineConfig&>(c))); },
          [ref, key](PipelineConfig& c, std::string_view v) { ref(c) = parse_double(v, key); }};
}

template <class Ref>
Field integer(std::string section, std::string key, Ref ref) {
  return {std::move(section), key,
          [ref](const PipelineConfig& c) {
            return std::to_string(ref(const_cast<PipelineConfig&>(c)));
          },
          [ref, key](PipelineConfig& c, std::string_view v) {
            using T = std::remove_reference_t<decltype(ref(c))>;
            const long long x = parse_int(v, key);
            if constexpr (std::is_unsigned_v<T>) {
              require(x >= 0, ErrorKind::kParse, key + ": must be non-negative");
            }
            ref(c) = static_cast<T>(x);
          }};
}

template <class Ref>
Field boolean(std::string section, std::string key, Ref ref) {
  return {std::move(section), key,
          [ref](const PipelineConfig& c) {
            return std::string(ref(const_cast<PipelineConfig&>(c)) ? "true" : "false");
          },
          [ref, key](PipelineConfig& c, std::string_view v) {
            if (v == "true" || v == "1") ref(c) = true;
            else if (v == "false" || v == "0") ref(c) = false;
            else fail(ErrorKind::kParse, key + ": expected true or false");
          }};
}

template <class Ref>
Field text(std::string section, std::string key, Ref ref) {
  return {std::move(section), key,
          [ref](const PipelineConfig& c) { return ref(const_cast<PipelineConfig&>(c)); },
          [ref](PipelineConfig& c, std::string_view v) { ref(c) = std::string(v); }};
}

#define PPS_REF(expr) [](PipelineConfig& c) -> auto& { return expr; }

const std::vector<Field>& fields() {
  static const std::vector<Field> kFields = {
      text("paths", "traces_dir", PPS_REF(c.paths.traces_dir)),
      text("paths", "ppg_dir", PPS_REF(c.paths.ppg_dir)),
      text("paths", "rppg_dir", PPS_REF(c.paths.rppg_dir)),
      text("paths", "cycles_dir", PPS_REF(c.paths.cycles_dir)),
      text("paths", "models_dir", PPS_REF(c.paths.models_dir)),
      text("paths", "reports_dir", PPS_REF(c.paths.reports_dir)),

      integer("global", "rng_seed", PPS_REF(c.rng_seed)),

      integer("synth", "n_subjects", PPS_REF(c.experiment.n_subjects)),
      real("synth", "pulse_a1", PPS_REF(c.experiment.synth.pulse.a1)),
      real("synth", "pulse_c1", PPS_REF(c.experiment.synth.pulse.c1)),
      real("synth", "pulse_w1", PPS_REF(c.experiment.synth.pulse.w1)),
      real("synth", "pulse_a2", PPS_REF(c.experiment.synth.pulse.a2)),
      real("synth", "pulse_c2", PPS_REF(c.experiment.synth.pulse.c2)),
      real("synth", "pulse_w2", PPS_REF(c.experiment.synth.pulse.w2)),
      real("synth", "heart_rate_bpm", PPS_REF(c.experiment.synth.heart_rate_bpm)),
      real("synth", "phase_shift_s", PPS_REF(c.experiment.synth.phase_shift_s)),
      real("synth", "warp_gamma", PPS_REF(c.experiment.synth.warp_gamma)),
      real("synth", "noise_sigma", PPS_REF(c.experiment.synth.noise_sigma)),
      real("synth", "center_jitter", PPS_REF(c.experiment.synth.center_jitter)),
      real("synth", "width_jitter", PPS_REF(c.experiment.synth.width_jitter)),
      real("synth", "amplitude_jitter", PPS_REF(c.experiment.synth.amplitude_jitter)),
      real("synth", "heart_rate_jitter_bpm", PPS_REF(c.experiment.synth.heart_rate_jitter_bpm)),
      real("synth", "ibi_variability", PPS_REF(c.experiment.synth.ibi_variability)),
      real("synth", "beat_amplitude_jitter", PPS_REF(c.experiment.synth.beat_amplitude_jitter)),
      real("synth", "ppg_noise_sigma", PPS_REF(c.experiment.synth.ppg_noise_sigma)),
      real("synth", "ppg_rate_hz", PPS_REF(c.experiment.synth.ppg_rate_hz)),
      real("synth", "rppg_rate_hz", PPS_REF(c.experiment.synth.rppg_rate_hz)),
      real("synth", "duration_s", PPS_REF(c.experiment.synth.duration_s)),

      real("chrom", "window_seconds", PPS_REF(c.experiment.prep.chrom.window_seconds)),
      real("chrom", "overlap_fraction", PPS_REF(c.experiment.prep.chrom.overlap_fraction)),

      real("bandpass", "low_hz", PPS_REF(c.experiment.prep.band.low_hz)),
      real("bandpass", "high_hz", PPS_REF(c.experiment.prep.band.high_hz)),

      real("segment", "min_cycle_s", PPS_REF(c.experiment.prep.segment.min_cycle_s)),
      real("segment", "max_cycle_s", PPS_REF(c.experiment.prep.segment.max_cycle_s)),
      real("segment", "valley_guard_fraction",
           PPS_REF(c.experiment.prep.segment.valley_guard_fraction)),
      real("segment", "min_rate_hz", PPS_REF(c.experiment.prep.segment.min_rate_hz)),
      real("segment", "max_rate_hz", PPS_REF(c.experiment.prep.segment.max_rate_hz)),
      boolean("segment", "apply_bandpass", PPS_REF(c.experiment.prep.segment_bandpass)),

      integer("savgol", "window_len", PPS_REF(c.experiment.savgol.window_len)),
      integer("savgol", "poly_order", PPS_REF(c.experiment.savgol.poly_order)),

      real("sigr", "gp_lambda", PPS_REF(c.experiment.sigr.gp_lambda)),
      real("sigr", "rec_lambda", PPS_REF(c.experiment.sigr.rec_lambda)),
      integer("sigr", "critic_steps_per_gen_step",
              PPS_REF(c.experiment.sigr.critic_steps_per_gen_step)),
      real("sigr", "learning_rate", PPS_REF(c.experiment.sigr.learning_rate)),
      real("sigr", "adam_beta1", PPS_REF(c.experiment.sigr.adam_beta1)),
      real("sigr", "adam_beta2", PPS_REF(c.experiment.sigr.adam_beta2)),
      integer("sigr", "batch_size", PPS_REF(c.experiment.sigr.batch_size)),
      integer("sigr", "epochs", PPS_REF(c.experiment.sigr.epochs)),
      integer("sigr", "max_steps", PPS_REF(c.experiment.sigr.max_steps)),
      integer("sigr", "folds", PPS_REF(c.experiment.sigr_folds)),

      integer("auth", "epochs", PPS_REF(c.experiment.auth.epochs)),
      real("auth", "learning_rate", PPS_REF(c.experiment.auth.learning_rate)),
      integer("auth", "batch_size", PPS_REF(c.experiment.auth.batch_size)),
      real("auth", "victim_train_fraction", PPS_REF(c.experiment.auth.victim_train_fraction)),
      real("auth", "other_train_fraction", PPS_REF(c.experiment.auth.other_train_fraction)),
      real("auth", "target_eer", PPS_REF(c.experiment.auth.target_eer)),
      real("auth", "eer_tolerance", PPS_REF(c.experiment.auth.eer_tolerance)),

      integer("trace", "max_gap_frames", PPS_REF(c.trace.max_gap_frames)),

      real("eval", "low_fps", PPS_REF(c.experiment.low_fps)),
  };
  return kFields;
}

#undef PPS_REF

}  // namespace

void PipelineConfig::apply_seed(std::uint64_t seed) {
  rng_seed = seed;
  experiment.seed = seed;
  experiment.synth.rng_seed = seed;
  experiment.sigr.rng_seed = seed * 1000 + 1;
  experiment.auth.seed = seed * 1000 + 500;
}

void PipelineConfig::validate() const {
  experiment.validate();
  require(trace.max_gap_frames >= 0, ErrorKind::kParameter,
          "config: trace.max_gap_frames must be non-negative");
  const ChromSpec& ch = experiment.prep.chrom;
  ch.validate(experiment.synth.rppg_rate_hz);
  ch.validate(experiment.low_fps);
}

std::string PipelineConfig::to_text() const {
  std::ostringstream os;
  std::string section;
  for (const auto& f : fields()) {
    if (f.section != section) {
      if (!section.empty()) os << '\n';
      section = f.section;
      os << '[' << section << "]\n";
    }
    os << f.key << " = " << f.get(*this) << '\n';
  }
  return os.str();
}

std::string PipelineConfig::hash() const { return hex64(fnv1a64(to_text())); }

PipelineConfig PipelineConfig::parse(std::string_view text, std::string_view source) {
  PipelineConfig cfg;
  cfg.apply_seed(cfg.rng_seed);
  std::map<std::pair<std::string, std::string>, const Field*> index;
  for (const auto& f : fields()) index[{f.section, f.key}] = &f;

  std::string section;
  std::size_t line_no = 0;
  bool seed_set = false;
  std::vector<std::pair<const Field*, std::string>> assignments;
  auto where = [&]() { return std::string(source) + ":" + std::to_string(line_no) + ": "; };
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      require(line.back() == ']', ErrorKind::kParse, where() + "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      bool known = false;
      for (const auto& f : fields()) known = known || f.section == section;
      require(known, ErrorKind::kParse, where() + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    require(eq != std::string_view::npos, ErrorKind::kParse, where() + "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    require(!section.empty(), ErrorKind::kParse, where() + "key outside any section");
    const auto it = index.find({section, key});
    require(it != index.end(), ErrorKind::kParse,
            where() + "unknown key '" + key + "' in [" + section + "]");
    if (section == "global" && key == "rng_seed") seed_set = true;
    assignments.emplace_back(it->second, value);
  }
  // The global seed feeds the module seeds, so it is applied first.
  for (const auto& [f, v] : assignments) {
    if (f->section == "global" && f->key == "rng_seed") {
      try {
        f->set(cfg, v);
      } catch (const Error& e) {
        fail(ErrorKind::kParse, std::string(source) + ": " + e.what());
      }
    }
  }
  if (seed_set) cfg.apply_seed(cfg.rng_seed);
  for (const auto& [f, v] : assignments) {
    try {
      f->set(cfg, v);
    } catch (const Error& e) {
      fail(ErrorKind::kParse, std::string(source) + ": [" + f->section + "] " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) fail(ErrorKind::kIo, "no such config file: " + path.string());
  return parse(read_file(path), path.string());
}

}  // namespace ppgspoof
