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

#include "auth.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <sstream>

#include "errors.hpp"
#include "metrics.hpp"
#include "serialize.hpp"

namespace ppgspoof {

using nn::Activation;

// ---------------------------------------------------------------------------
// AuthSpec

void AuthSpec::validate() const {
  require(epochs > 0 && batch_size > 0, ErrorKind::kParameter,
          "auth spec: epochs and batch_size must be positive");
  require(learning_rate > 0.0, ErrorKind::kParameter,
          "auth spec: learning_rate must be positive");
  require(victim_train_fraction > 0.0 && victim_train_fraction < 1.0 &&
              other_train_fraction > 0.0 && other_train_fraction < 1.0,
          ErrorKind::kParameter, "auth spec: split fractions must lie in (0, 1)");
  require(target_eer > 0.0 && target_eer < 0.5 && eer_tolerance > 0.0,
          ErrorKind::kParameter, "auth spec: target_eer must lie in (0, 0.5)");
}

std::string AuthSpec::to_key_values() const {
  std::ostringstream os;
  os << "epochs=" << epochs << '\n'
     << "learning_rate=" << format_double(learning_rate) << '\n'
     << "batch_size=" << batch_size << '\n'
     << "seed=" << seed << '\n'
     << "victim_train_fraction=" << format_double(victim_train_fraction) << '\n'
     << "other_train_fraction=" << format_double(other_train_fraction) << '\n'
     << "target_eer=" << format_double(target_eer) << '\n'
     << "eer_tolerance=" << format_double(eer_tolerance) << '\n';
  return os.str();
}

AuthSpec AuthSpec::from_key_values(std::string_view text) {
  AuthSpec s;
  for (const auto& [key, value] : parse_key_value_lines(text)) {
    if (key == "epochs") s.epochs = static_cast<int>(parse_int(value, key));
    else if (key == "learning_rate") s.learning_rate = parse_double(value, key);
    else if (key == "batch_size") s.batch_size = static_cast<int>(parse_int(value, key));
    else if (key == "seed") s.seed = static_cast<std::uint64_t>(parse_int(value, key));
    else if (key == "victim_train_fraction")
      s.victim_train_fraction = parse_double(value, key);
    else if (key == "other_train_fraction")
      s.other_train_fraction = parse_double(value, key);
    else if (key == "target_eer") s.target_eer = parse_double(value, key);
    else if (key == "eer_tolerance") s.eer_tolerance = parse_double(value, key);
    else fail(ErrorKind::kParse, "auth spec: unknown key '" + key + "'");
  }
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// AuthNet

AuthNet::AuthNet(std::size_t cycle_length)
    : length_(cycle_length),
      c1_(1, 16, 5, Activation::kLeakyRelu),
      c2_(16, 32, 5, Activation::kLeakyRelu),
      lstm_(32, 32),
      head_(32, 1) {
  require(cycle_length >= 4 && cycle_length % 4 == 0, ErrorKind::kParameter,
          "auth net: cycle length must be a positive multiple of 4");
}

void AuthNet::init(nn::Rng& rng) {
  c1_.init_glorot(rng);
  c2_.init_glorot(rng);
  lstm_.init_glorot(rng);
  head_.init_glorot(rng);
}

double AuthNet::logit(std::span<const double> x, Cache* cache) const {
  require(x.size() == length_, ErrorKind::kParameter,
          "auth net: input length mismatch");
  Cache local;
  Cache& c = cache ? *cache : local;
  nn::Tensor h = nn::conv_forward(c1_, nn::from_samples(x), &c.c1);
  h = nn::maxpool2_forward(h, &c.p1);
  h = nn::conv_forward(c2_, h, &c.c2);
  h = nn::maxpool2_forward(h, &c.p2);
  c.h = lstm_.forward(h, &c.lstm);
  return head_.forward(c.h)[0];
}

void AuthNet::backward(const Cache& cache, double dlogit) {
  const double up[1] = {dlogit};
  const auto dh = head_.backward(cache.h, up);
  nn::Tensor g = lstm_.backward(cache.lstm, dh);
  g = nn::maxpool2_backward(cache.p2, g);
  g = nn::conv_backward(c2_, cache.c2, g);
  g = nn::maxpool2_backward(cache.p1, g);
  nn::conv_backward(c1_, cache.c1, g);
}

void AuthNet::zero_grad() {
  c1_.zero_grad();
  c2_.zero_grad();
  lstm_.zero_grad();
  head_.zero_grad();
}

void AuthNet::append_blocks(std::vector<nn::ParamBlock>& out) {
  c1_.append_blocks(out);
  c2_.append_blocks(out);
  lstm_.append_blocks(out);
  head_.append_blocks(out);
}

// ---------------------------------------------------------------------------
// Data split and training

AuthDataset AuthDataset::split(std::span<const BeatCycle> victim,
                               std::span<const BeatCycle> others,
                               const AuthSpec& spec) {
  spec.validate();
  nn::Rng rng(spec.seed);
  AuthDataset d;
  auto take = [&rng](std::span<const BeatCycle> src, double fraction,
                     std::vector<BeatCycle>& train, std::vector<BeatCycle>& test) {
    std::vector<std::size_t> idx(src.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_train = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(src.size())));
    for (std::size_t i = 0; i < idx.size(); ++i)
      (i < n_train ? train : test).push_back(src[idx[i]]);
  };
  take(victim, spec.victim_train_fraction, d.victim_train, d.victim_test);

  // Stratify the others by subject, in order of first appearance.
  std::vector<std::string> order;
  std::map<std::string, std::vector<BeatCycle>> by_subject;
  for (const auto& c : others) {
    auto [it, inserted] = by_subject.try_emplace(c.subject_id);
    if (inserted) order.push_back(c.subject_id);
    it->second.push_back(c);
  }
  for (const auto& id : order)
    take(by_subject[id], spec.other_train_fraction, d.other_train, d.other_test);
  return d;
}

AuthModel train_auth(std::span<const BeatCycle> victim_train,
                     std::span<const BeatCycle> other_train,
                     const AuthSpec& spec) {
  spec.validate();
  require(!victim_train.empty() && !other_train.empty(), ErrorKind::kParameter,
          "train_auth: both classes need training cycles");
  AuthModel model;
  model.spec = spec;
  model.noise_seed = spec.seed ^ 0x5bd1e9955bd1e995ULL;
  nn::Rng rng(spec.seed);
  model.net.init(rng);

  struct Item {
    const BeatCycle* cycle;
    double label;
    double weight;
  };
  const double w_victim = static_cast<double>(other_train.size()) /
                          static_cast<double>(victim_train.size());
  std::vector<Item> items;
  for (const auto& c : victim_train) {
    c.validate();
    items.push_back({&c, 1.0, w_victim});
  }
  for (const auto& c : other_train) {
    c.validate();
    items.push_back({&c, 0.0, 1.0});
  }

  std::vector<nn::ParamBlock> blocks;
  model.net.append_blocks(blocks);
  nn::Adam opt(std::move(blocks), {spec.learning_rate, 0.9, 0.999, 1e-8});
  AuthNet::Cache cache;
  const auto batch = static_cast<std::size_t>(spec.batch_size);
  for (int epoch = 0; epoch < spec.epochs; ++epoch) {
    std::shuffle(items.begin(), items.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < items.size(); start += batch) {
      const std::size_t end = std::min(items.size(), start + batch);
      const double inv = 1.0 / static_cast<double>(end - start);
      opt.zero_grad();
      for (std::size_t i = start; i < end; ++i) {
        const Item& it = items[i];
        const double z = model.net.logit(it.cycle->samples, &cache);
        // Stable BCE on logits: softplus(z) - y z.
        const double sp = std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
        epoch_loss += it.weight * (sp - it.label * z);
        model.net.backward(cache, it.weight * (nn::sigmoid(z) - it.label) * inv);
      }
      opt.step();
    }
    if (!std::isfinite(epoch_loss)) {
      fail(ErrorKind::kTraining, "train_auth: non-finite loss at epoch " +
                                     std::to_string(epoch));
    }
  }
  return model;
}

// ---------------------------------------------------------------------------
// Scoring

namespace {

constexpr double kLogitClamp = 36.0;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Standard normal draw from a 64-bit key (Box-Muller).
double keyed_normal(std::uint64_t key) {
  const std::uint64_t a = splitmix64(key);
  const std::uint64_t b = splitmix64(a);
  const double u1 = (static_cast<double>(a >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double detuned_score(double logit, std::uint64_t key, double sigma,
                     std::uint64_t seed) {
  double z = logit;
  if (sigma > 0.0) z += sigma * keyed_normal(key ^ seed);
  return nn::sigmoid(std::clamp(z, -kLogitClamp, kLogitClamp));
}

std::uint64_t cycle_key(const BeatCycle& cycle) {
  return fnv1a64({reinterpret_cast<const char*>(cycle.samples.data()),
                  cycle.samples.size() * sizeof(double)});
}

std::uint64_t score_key(double s) {
  std::uint64_t bits;
  std::memcpy(&bits, &s, sizeof(bits));
  return splitmix64(bits);
}

}  // namespace

double clean_logit(const AuthModel& model, const BeatCycle& cycle) {
  cycle.validate();
  const double z = model.net.logit(cycle.samples);
  require(std::isfinite(z), ErrorKind::kDataValidity,
          "auth: non-finite network output");
  return std::clamp(z, -kLogitClamp, kLogitClamp);
}

CalibrationProbe make_probe(const AuthModel& model, const BeatCycle& cycle) {
  return {clean_logit(model, cycle), cycle_key(cycle)};
}

double score(const AuthModel& model, const BeatCycle& cycle) {
  const auto p = make_probe(model, cycle);
  return detuned_score(p.logit, p.key, model.noise_sigma, model.noise_seed);
}

Decision authenticate(const AuthModel& model, const BeatCycle& cycle) {
  require(model.calibrated(), ErrorKind::kUsage,
          "authenticate: model has not been calibrated");
  const double s = score(model, cycle);
  return {s, s >= model.threshold};
}

// ---------------------------------------------------------------------------
// Calibration

CalibrationReport calibrate(AuthModel& model,
                            std::span<const CalibrationProbe> genuine,
                            std::span<const CalibrationProbe> impostor,
                            double target_eer) {
  require(!genuine.empty() && !impostor.empty(), ErrorKind::kParameter,
          "calibrate: empty score set");
  require(target_eer > 0.0 && target_eer < 0.5, ErrorKind::kParameter,
          "calibrate: target_eer must lie in (0, 0.5)");
  const double tol = model.spec.eer_tolerance;
  constexpr int kMaxIterations = 20;

  std::vector<double> gs(genuine.size()), is(impostor.size());
  auto evaluate = [&](double sigma) {
    for (std::size_t i = 0; i < genuine.size(); ++i)
      gs[i] = detuned_score(genuine[i].logit, genuine[i].key, sigma, model.noise_seed);
    for (std::size_t i = 0; i < impostor.size(); ++i)
      is[i] = detuned_score(impostor[i].logit, impostor[i].key, sigma, model.noise_seed);
    return far_frr_eer(gs, is);
  };

  CalibrationReport best;
  EerResult r = evaluate(0.0);
  best = {r.eer, r.threshold, 0.0, 0};
  if (r.eer > target_eer + tol) {
    fail(ErrorKind::kCalibration,
         "calibrate: achieved EER " + format_double(r.eer) +
             " lies above the target; noise cannot lower it");
  }
  if (std::abs(r.eer - target_eer) > tol) {
    // Inject noise: grow sigma geometrically until the EER overshoots, then
    // bisect. Stop early once the EER is within a sixth of the tolerance.
    double lo = 0.0, hi = std::numeric_limits<double>::infinity(), sigma = 0.5;
    for (int it = 1; it <= kMaxIterations; ++it) {
      r = evaluate(sigma);
      if (std::abs(r.eer - target_eer) < std::abs(best.eer - target_eer))
        best = {r.eer, r.threshold, sigma, it};
      best.iterations = it;
      if (std::abs(r.eer - target_eer) <= tol / 6.0) break;
      if (r.eer < target_eer) lo = sigma;
      else hi = sigma;
      sigma = std::isinf(hi) ? 2.0 * sigma : 0.5 * (lo + hi);
    }
    if (std::abs(best.eer - target_eer) > tol) {
      fail(ErrorKind::kCalibration,
           "calibrate: could not reach target EER " + format_double(target_eer) +
               " within " + std::to_string(kMaxIterations) +
               " noise rounds; achieved " + format_double(best.eer));
    }
  }
  model.threshold = best.threshold;
  model.noise_sigma = best.noise_sigma;
  model.eer = best.eer;
  return best;
}

CalibrationReport calibrate(AuthModel& model, std::span<const BeatCycle> genuine,
                            std::span<const BeatCycle> impostor,
                            double target_eer) {
  std::vector<CalibrationProbe> g, im;
  g.reserve(genuine.size());
  im.reserve(impostor.size());
  for (const auto& c : genuine) g.push_back(make_probe(model, c));
  for (const auto& c : impostor) im.push_back(make_probe(model, c));
  return calibrate(model, g, im, target_eer);
}

CalibrationReport calibrate_scores(AuthModel& model,
                                   std::span<const double> genuine_scores,
                                   std::span<const double> impostor_scores,
                                   double target_eer) {
  auto to_probes = [](std::span<const double> scores) {
    std::vector<CalibrationProbe> out;
    for (double s : scores) {
      require(s > 0.0 && s < 1.0, ErrorKind::kParameter,
              "calibrate: scores must lie in (0, 1)");
      out.push_back({std::log(s) - std::log1p(-s), score_key(s)});
    }
    return out;
  };
  const auto g = to_probes(genuine_scores);
  const auto im = to_probes(impostor_scores);
  return calibrate(model, g, im, target_eer);
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

constexpr std::string_view kAuthMagic = "AUTH1";

void write_conv(ByteWriter& w, const nn::Conv1d& c) {
  w.u64(c.in_channels());
  w.u64(c.out_channels());
  w.u64(c.kernel_len());
  w.u64(static_cast<std::uint64_t>(c.activation()));
}

void check_conv(ByteReader& r, const nn::Conv1d& c) {
  const auto in = r.u64(), out = r.u64(), k = r.u64(), act = r.u64();
  require(in == c.in_channels() && out == c.out_channels() &&
              k == c.kernel_len() &&
              act == static_cast<std::uint64_t>(c.activation()),
          ErrorKind::kParse, "auth model file: layer dimensions do not match");
}

}  // namespace

void save_auth(const AuthModel& model, const std::filesystem::path& path) {
  const AuthNet& n = model.net;
  ByteWriter w;
  w.raw(kAuthMagic);
  w.u64(n.cycle_length());
  write_conv(w, n.conv1());
  write_conv(w, n.conv2());
  w.u64(n.lstm().input_size());
  w.u64(n.lstm().hidden_size());
  w.u64(n.head().in_size());
  w.u64(n.head().out_size());
  w.f64s(n.conv1().weight());
  w.f64s(n.conv1().bias());
  w.f64s(n.conv2().weight());
  w.f64s(n.conv2().bias());
  w.f64s(n.lstm().input_weight());
  w.f64s(n.lstm().hidden_weight());
  w.f64s(n.lstm().bias());
  w.f64s(n.head().weight());
  w.f64s(n.head().bias());
  w.f64(model.threshold);
  w.f64(model.noise_sigma);
  w.u64(model.noise_seed);
  w.f64(model.eer);
  w.raw(model.spec.to_key_values());
  write_file(path, w.bytes());
}

AuthModel load_auth(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  ByteReader r(bytes);
  require(r.raw(kAuthMagic.size()) == kAuthMagic, ErrorKind::kParse,
          path.string() + ": not an AUTH1 model file");
  require(r.u64() == kCycleLength, ErrorKind::kParse,
          "auth model file: unsupported cycle length");
  AuthModel m;
  AuthNet& n = m.net;
  check_conv(r, n.conv1());
  check_conv(r, n.conv2());
  require(r.u64() == n.lstm().input_size() && r.u64() == n.lstm().hidden_size() &&
              r.u64() == n.head().in_size() && r.u64() == n.head().out_size(),
          ErrorKind::kParse, "auth model file: recurrent/head size mismatch");
  r.f64s(n.conv1().weight());
  r.f64s(n.conv1().bias());
  r.f64s(n.conv2().weight());
  r.f64s(n.conv2().bias());
  r.f64s(n.lstm().input_weight());
  r.f64s(n.lstm().hidden_weight());
  r.f64s(n.lstm().bias());
  r.f64s(n.head().weight());
  r.f64s(n.head().bias());
  m.threshold = r.f64();
  m.noise_sigma = r.f64();
  m.noise_seed = r.u64();
  m.eer = r.f64();
  m.spec = AuthSpec::from_key_values(r.rest());
  return m;
}

}  // namespace ppgspoof
