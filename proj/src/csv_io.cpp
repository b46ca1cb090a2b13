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

#include "csv_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "errors.hpp"
#include "serialize.hpp"

namespace ppgspoof {

namespace {

struct Row {
  std::size_t line = 0;
  std::vector<std::string_view> fields;
};

struct Table {
  std::string source;
  std::vector<std::string_view> header;
  std::vector<Row> rows;

  std::size_t column(std::string_view name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      fail(ErrorKind::kParse, source + ": missing column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - header.begin());
  }

  [[noreturn]] void error(const Row& r, const std::string& what) const {
    fail(ErrorKind::kParse, source + ":" + std::to_string(r.line) + ": " + what);
  }

  double number(const Row& r, std::size_t col, std::string_view name) const {
    const auto t = trim(r.fields[col]);
    double v = 0.0;
    try {
      v = parse_double(t, name);
    } catch (const Error&) {
      error(r, "column '" + std::string(name) + "': not a number: '" +
                   std::string(t) + "'");
    }
    return v;
  }

  long long integer(const Row& r, std::size_t col, std::string_view name) const {
    const auto t = trim(r.fields[col]);
    long long v = 0;
    try {
      v = parse_int(t, name);
    } catch (const Error&) {
      error(r, "column '" + std::string(name) + "': not an integer: '" +
                   std::string(t) + "'");
    }
    return v;
  }
};

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

Table parse_table(std::string_view text, std::string_view source) {
  Table t;
  t.source = std::string(source);
  std::size_t line_no = 0;
  bool have_header = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    if (!have_header) {
      t.header = split(line);
      have_header = true;
      continue;
    }
    Row r{line_no, split(line)};
    if (r.fields.size() != t.header.size()) {
      t.error(r, "expected " + std::to_string(t.header.size()) + " fields, found " +
                     std::to_string(r.fields.size()));
    }
    t.rows.push_back(std::move(r));
  }
  if (!have_header) fail(ErrorKind::kParse, t.source + ": empty file");
  return t;
}

// Sample rate from strictly increasing times; rejects jitter over 5%.
double infer_rate(const Table& tab, const std::vector<double>& t) {
  require(t.size() >= 2, ErrorKind::kDataValidity,
          tab.source + ": need at least 2 rows");
  std::vector<double> dt(t.size() - 1);
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) tab.error(tab.rows[i], "t_seconds not strictly increasing");
    dt[i - 1] = t[i] - t[i - 1];
  }
  std::vector<double> sorted = dt;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2),
                   sorted.end());
  const double median = sorted[sorted.size() / 2];
  for (std::size_t i = 0; i < dt.size(); ++i) {
    if (std::abs(dt[i] - median) > 0.05 * median) {
      fail(ErrorKind::kDataValidity,
           tab.source + ":" + std::to_string(tab.rows[i + 1].line) +
               ": sampling interval deviates more than 5% from the median");
    }
  }
  // Snap to a micro-hertz grid so written files read back at the same rate.
  return std::round(1e6 / median) / 1e6;
}

std::string header_row(std::initializer_list<std::string_view> cols) {
  std::string h;
  for (auto c : cols) {
    if (!h.empty()) h += ',';
    h += c;
  }
  return h + '\n';
}

std::string read_text(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    fail(ErrorKind::kIo, "no such file: " + path.string());
  return read_file(path);
}

}  // namespace

// ---------------------------------------------------------------------------
// Waveforms

WaveSignal parse_waveform_csv(std::string_view text, SignalLabel label,
                              std::string_view source) {
  const Table tab = parse_table(text, source);
  const auto ct = tab.column("t_seconds"), cv = tab.column("value");
  std::vector<double> t, v;
  for (const auto& r : tab.rows) {
    t.push_back(tab.number(r, ct, "t_seconds"));
    v.push_back(tab.number(r, cv, "value"));
    if (!std::isfinite(v.back()) || !std::isfinite(t.back()))
      fail(ErrorKind::kDataValidity,
           tab.source + ":" + std::to_string(r.line) + ": non-finite value");
  }
  const double rate = infer_rate(tab, t);
  return WaveSignal(std::move(v), rate, label);
}

WaveSignal read_waveform_csv(const std::filesystem::path& path, SignalLabel label) {
  return parse_waveform_csv(read_text(path), label, path.string());
}

std::string format_waveform_csv(const WaveSignal& sig) {
  std::string out = header_row({"t_seconds", "value"});
  const auto s = sig.samples();
  for (std::size_t i = 0; i < s.size(); ++i) {
    out += format_double(static_cast<double>(i) / sig.sample_rate_hz());
    out += ',';
    out += format_double(s[i]);
    out += '\n';
  }
  return out;
}

void write_waveform_csv(const WaveSignal& sig, const std::filesystem::path& path) {
  write_file(path, format_waveform_csv(sig));
}

// ---------------------------------------------------------------------------
// Traces

RgbTrace parse_trace_csv(std::string_view text, const TracePolicy& policy,
                         std::string_view source, TraceGapStats* stats) {
  require(policy.max_gap_frames >= 0, ErrorKind::kParameter,
          "trace policy: max_gap_frames must be non-negative");
  const Table tab = parse_table(text, source);
  const auto cf = tab.column("frame_index"), ct = tab.column("t_seconds");
  const std::size_t cc[3] = {tab.column("r_mean"), tab.column("g_mean"),
                             tab.column("b_mean")};
  const auto cn = tab.column("skin_pixel_count");

  const std::size_t n = tab.rows.size();
  std::vector<double> t(n);
  std::vector<Rgb> frames(n);
  std::vector<bool> gap(n, false);
  std::vector<std::uint64_t> counts(n, 0);
  bool any_count = false, all_count = true;
  for (std::size_t i = 0; i < n; ++i) {
    const Row& r = tab.rows[i];
    const long long fi = tab.integer(r, cf, "frame_index");
    if (i > 0 && fi != tab.integer(tab.rows[i - 1], cf, "frame_index") + 1)
      tab.error(r, "frame_index must increase by 1");
    t[i] = tab.number(r, ct, "t_seconds");
    if (r.fields[cn].empty()) {
      all_count = false;
    } else {
      const long long c = tab.integer(r, cn, "skin_pixel_count");
      if (c < 0) tab.error(r, "skin_pixel_count must be non-negative");
      counts[i] = static_cast<std::uint64_t>(c);
      any_count = true;
    }
    int missing = 0;
    double ch[3];
    for (int k = 0; k < 3; ++k) {
      const auto f = r.fields[cc[k]];
      if (f.empty()) {
        ch[k] = std::numeric_limits<double>::quiet_NaN();
      } else {
        ch[k] = tab.number(r, cc[k], tab.header[cc[k]]);
      }
      if (std::isnan(ch[k])) ++missing;
    }
    const bool zero_count = !r.fields[cn].empty() && counts[i] == 0;
    if (missing > 0 || zero_count) {
      if (!zero_count) tab.error(r, "channel values missing on a frame with skin pixels");
      gap[i] = true;
    } else {
      for (int k = 0; k < 3; ++k) {
        if (!std::isfinite(ch[k]) || ch[k] < 0.0)
          tab.error(r, "channel means must be finite and non-negative");
      }
      frames[i] = {ch[0], ch[1], ch[2]};
    }
  }
  if (any_count && !all_count)
    fail(ErrorKind::kParse, tab.source + ": skin_pixel_count present on some rows only");

  TraceGapStats local;
  for (std::size_t i = 0; i < n;) {
    if (!gap[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && gap[j]) ++j;
    const std::size_t run = j - i;
    local.gap_rows += run;
    local.longest_run = std::max(local.longest_run, run);
    if (run > static_cast<std::size_t>(policy.max_gap_frames)) {
      fail(ErrorKind::kDataValidity,
           tab.source + ":" + std::to_string(tab.rows[i].line) +
               ": signal interruption of " + std::to_string(run) +
               " frames exceeds max_gap_frames " +
               std::to_string(policy.max_gap_frames));
    }
    if (i == 0 || j == n) {
      fail(ErrorKind::kDataValidity,
           tab.source + ":" + std::to_string(tab.rows[i].line) +
               ": gap at the start or end of the trace cannot be filled");
    }
    const Rgb& a = frames[i - 1];
    const Rgb& b = frames[j];
    for (std::size_t k = i; k < j; ++k) {
      const double w = (t[k] - t[i - 1]) / (t[j] - t[i - 1]);
      frames[k] = {a.r + w * (b.r - a.r), a.g + w * (b.g - a.g), a.b + w * (b.b - a.b)};
    }
    i = j;
  }
  if (stats) *stats = local;

  RgbTrace trace;
  trace.frame_rate_hz = infer_rate(tab, t);
  trace.frames = std::move(frames);
  if (any_count) trace.skin_pixel_counts = std::move(counts);
  return trace;
}

RgbTrace read_trace_csv(const std::filesystem::path& path, const TracePolicy& policy,
                        TraceGapStats* stats) {
  return parse_trace_csv(read_text(path), policy, path.string(), stats);
}

std::string format_trace_csv(const RgbTrace& trace, std::span<const bool> gaps) {
  require(gaps.empty() || gaps.size() == trace.size(), ErrorKind::kParameter,
          "format_trace_csv: gap mask length mismatch");
  std::string out = header_row(
      {"frame_index", "t_seconds", "r_mean", "g_mean", "b_mean", "skin_pixel_count"});
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_double(static_cast<double>(i) / trace.frame_rate_hz);
    if (!gaps.empty() && gaps[i]) {
      out += ",,,,0\n";
      continue;
    }
    const Rgb& f = trace.frames[i];
    out += ',' + format_double(f.r) + ',' + format_double(f.g) + ',' + format_double(f.b);
    out += ',';
    if (trace.skin_pixel_counts) out += std::to_string((*trace.skin_pixel_counts)[i]);
    out += '\n';
  }
  return out;
}

void write_trace_csv(const RgbTrace& trace, const std::filesystem::path& path) {
  trace.validate();
  write_file(path, format_trace_csv(trace));
}

// ---------------------------------------------------------------------------
// Cycle archives

std::vector<BeatCycle> parse_cycle_archive(std::string_view text,
                                           std::string_view source) {
  const Table tab = parse_table(text, source);
  const auto cs = tab.column("subject_id"), ci = tab.column("cycle_index"),
             cl = tab.column("source_label");
  std::vector<std::size_t> sc(kCycleLength);
  for (std::size_t k = 0; k < kCycleLength; ++k) sc[k] = tab.column("s" + std::to_string(k));
  std::vector<BeatCycle> out;
  out.reserve(tab.rows.size());
  for (const auto& r : tab.rows) {
    BeatCycle c;
    c.subject_id = std::string(r.fields[cs]);
    if (c.subject_id.empty()) tab.error(r, "empty subject_id");
    c.cycle_index = static_cast<int>(tab.integer(r, ci, "cycle_index"));
    const auto label = parse_label(r.fields[cl]);
    if (!label) tab.error(r, "unknown source_label '" + std::string(r.fields[cl]) + "'");
    c.source_label = *label;
    c.samples.resize(kCycleLength);
    for (std::size_t k = 0; k < kCycleLength; ++k)
      c.samples[k] = tab.number(r, sc[k], tab.header[sc[k]]);
    try {
      c.validate();
    } catch (const Error& e) {
      fail(ErrorKind::kDataValidity,
           tab.source + ":" + std::to_string(r.line) + ": " + e.what());
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<BeatCycle> read_cycle_archive(const std::filesystem::path& path) {
  return parse_cycle_archive(read_text(path), path.string());
}

std::string format_cycle_archive(std::span<const BeatCycle> cycles) {
  std::string out = "subject_id,cycle_index,source_label";
  for (std::size_t k = 0; k < kCycleLength; ++k) out += ",s" + std::to_string(k);
  out += '\n';
  for (const auto& c : cycles) {
    c.validate();
    out += c.subject_id + ',' + std::to_string(c.cycle_index) + ',' +
           std::string(label_name(c.source_label));
    for (double v : c.samples) out += ',' + format_double(v);
    out += '\n';
  }
  return out;
}

void write_cycle_archive(std::span<const BeatCycle> cycles,
                         const std::filesystem::path& path) {
  write_file(path, format_cycle_archive(cycles));
}

// ---------------------------------------------------------------------------
// Feature tables and decision logs

std::string format_feature_table(std::span<const BeatCycle> cycles) {
  std::string out = "subject_id,cycle_index,source_label";
  for (auto n : FiducialFeatures::names()) out += ',' + std::string(n);
  out += '\n';
  for (const auto& c : cycles) {
    FiducialFeatures f;
    try {
      f = extract_features(c);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kFeatureExtraction) throw;
      continue;
    }
    out += c.subject_id + ',' + std::to_string(c.cycle_index) + ',' +
           std::string(label_name(c.source_label));
    for (double v : f.values()) out += ',' + format_double(v);
    out += '\n';
  }
  return out;
}

void write_feature_table(std::span<const BeatCycle> cycles,
                         const std::filesystem::path& path) {
  write_file(path, format_feature_table(cycles));
}

std::string format_decision_log(std::span<const DecisionRow> rows) {
  std::string out = header_row({"subject_id", "cycle_index", "source_label", "score", "accept"});
  for (const auto& r : rows) {
    out += r.subject_id + ',' + std::to_string(r.cycle_index) + ',' +
           std::string(label_name(r.source_label)) + ',' + format_double(r.score) +
           ',' + (r.accept ? "1" : "0") + '\n';
  }
  return out;
}

void write_decision_log(std::span<const DecisionRow> rows,
                        const std::filesystem::path& path) {
  write_file(path, format_decision_log(rows));
}

std::string subject_id_from_path(const std::filesystem::path& path) {
  const std::string stem = path.stem().string();
  require(!stem.empty(), ErrorKind::kParameter,
          "cannot derive a subject id from " + path.string());
  for (char ch : stem) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '_' || ch == '-' || ch == '.';
    require(ok, ErrorKind::kParameter,
            "subject id '" + stem + "' may only contain letters, digits, '_', '-', '.'");
  }
  return stem;
}

}  // namespace ppgspoof
