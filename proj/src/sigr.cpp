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

#include "sigr.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "serialize.hpp"

namespace ppgspoof {

using nn::Activation;
using nn::Conv1d;
using nn::Tensor;

// ---------------------------------------------------------------------------
// TrainSpec

void TrainSpec::validate() const {
  require(gp_lambda >= 0.0 && rec_lambda >= 0.0, ErrorKind::kParameter,
          "train spec: lambdas must be non-negative");
  require(critic_steps_per_gen_step > 0, ErrorKind::kParameter,
          "train spec: critic_steps_per_gen_step must be positive");
  require(learning_rate > 0.0, ErrorKind::kParameter,
          "train spec: learning_rate must be positive");
  require(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 &&
              adam_beta2 < 1.0,
          ErrorKind::kParameter, "train spec: Adam betas must lie in [0, 1)");
  require(batch_size > 0 && epochs > 0 && max_steps >= 0,
          ErrorKind::kParameter,
          "train spec: batch_size and epochs must be positive");
}

std::string TrainSpec::to_key_values() const {
  std::ostringstream os;
  os << "gp_lambda=" << format_double(gp_lambda) << '\n'
     << "rec_lambda=" << format_double(rec_lambda) << '\n'
     << "critic_steps_per_gen_step=" << critic_steps_per_gen_step << '\n'
     << "learning_rate=" << format_double(learning_rate) << '\n'
     << "adam_beta1=" << format_double(adam_beta1) << '\n'
     << "adam_beta2=" << format_double(adam_beta2) << '\n'
     << "batch_size=" << batch_size << '\n'
     << "epochs=" << epochs << '\n'
     << "max_steps=" << max_steps << '\n'
     << "rng_seed=" << rng_seed << '\n';
  return os.str();
}

TrainSpec TrainSpec::from_key_values(std::string_view text) {
  TrainSpec s;
  for (const auto& [key, value] : parse_key_value_lines(text)) {
    if (key == "gp_lambda") s.gp_lambda = parse_double(value, key);
    else if (key == "rec_lambda") s.rec_lambda = parse_double(value, key);
    else if (key == "critic_steps_per_gen_step")
      s.critic_steps_per_gen_step = static_cast<int>(parse_int(value, key));
    else if (key == "learning_rate") s.learning_rate = parse_double(value, key);
    else if (key == "adam_beta1") s.adam_beta1 = parse_double(value, key);
    else if (key == "adam_beta2") s.adam_beta2 = parse_double(value, key);
    else if (key == "batch_size") s.batch_size = static_cast<int>(parse_int(value, key));
    else if (key == "epochs") s.epochs = static_cast<int>(parse_int(value, key));
    else if (key == "max_steps") s.max_steps = static_cast<long>(parse_int(value, key));
    else if (key == "rng_seed")
      s.rng_seed = static_cast<std::uint64_t>(parse_int(value, key));
    else fail(ErrorKind::kParse, "train spec: unknown key '" + key + "'");
  }
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// Generator

Generator::Generator()
    : layers_{Conv1d(1, 32, 7, Activation::kLeakyRelu),
              Conv1d(32, 64, 7, Activation::kLeakyRelu),
              Conv1d(64, 32, 7, Activation::kLeakyRelu),
              Conv1d(32, 1, 7, Activation::kLinear)} {}

Generator Generator::identity() {
  Generator g;
  for (auto& layer : g.layers_) {
    std::fill(layer.weight().begin(), layer.weight().end(), 0.0);
    std::fill(layer.bias().begin(), layer.bias().end(), 0.0);
    // Channel 0 -> channel 0 centre tap.
    layer.weight()[layer.kernel_len() / 2] = 1.0;
  }
  return g;
}

void Generator::init(nn::Rng& rng) {
  for (auto& layer : layers_) layer.init_glorot(rng);
}

std::vector<double> Generator::forward(std::span<const double> cycle,
                                       Cache* cache) const {
  Tensor x = nn::from_samples(cycle);
  for (std::size_t l = 0; l < kLayers; ++l)
    x = nn::conv_forward(layers_[l], x, cache ? &cache->layers[l] : nullptr);
  return std::move(x.data);
}

std::vector<double> Generator::backward(const Cache& cache,
                                        std::span<const double> grad_out) {
  Tensor g = nn::from_samples(grad_out);
  for (std::size_t l = kLayers; l-- > 0;)
    g = nn::conv_backward(layers_[l], cache.layers[l], g);
  return std::move(g.data);
}

void Generator::zero_grad() {
  for (auto& layer : layers_) layer.zero_grad();
}

void Generator::append_blocks(std::vector<nn::ParamBlock>& out) {
  for (auto& layer : layers_) layer.append_blocks(out);
}

// ---------------------------------------------------------------------------
// Critic

Critic::Critic(std::size_t cycle_length)
    : length_(cycle_length),
      c1_(1, 32, 7, Activation::kLeakyRelu),
      c2_(32, 64, 7, Activation::kLeakyRelu),
      head_(64 * (cycle_length / 4), 1) {
  require(cycle_length >= 4 && cycle_length % 4 == 0, ErrorKind::kParameter,
          "critic: cycle length must be a positive multiple of 4");
}

void Critic::init(nn::Rng& rng) {
  c1_.init_glorot(rng);
  c2_.init_glorot(rng);
  head_.init_glorot(rng);
}

double Critic::forward(std::span<const double> x, Cache* cache) const {
  require(x.size() == length_, ErrorKind::kParameter,
          "critic: input length mismatch");
  Cache local;
  Cache& c = cache ? *cache : local;
  Tensor h = nn::conv_forward(c1_, nn::from_samples(x), &c.c1);
  h = nn::maxpool2_forward(h, &c.p1);
  h = nn::conv_forward(c2_, h, &c.c2);
  h = nn::maxpool2_forward(h, &c.p2);
  c.flat = std::move(h.data);
  c.valid = true;
  return head_.forward(c.flat)[0];
}

std::vector<double> Critic::backward(const Cache& cache, double upstream,
                                     bool accumulate_params) {
  require(cache.valid, ErrorKind::kUsage,
          "critic backward called without a recorded forward");
  const double up[1] = {upstream};
  auto gflat = head_.backward(cache.flat, up, accumulate_params);
  Tensor g(c2_.out_channels(), length_ / 4);
  g.data = std::move(gflat);
  g = nn::maxpool2_backward(cache.p2, g);
  g = nn::conv_backward(c2_, cache.c2, g, accumulate_params);
  g = nn::maxpool2_backward(cache.p1, g);
  g = nn::conv_backward(c1_, cache.c1, g, accumulate_params);
  return std::move(g.data);
}

std::vector<double> Critic::input_gradient(std::span<const double> x) const {
  Cache cache;
  forward(x, &cache);
  // backward() is non-const only because it may accumulate; it does not here.
  return const_cast<Critic*>(this)->backward(cache, 1.0, false);
}

namespace {

void scale_by_slope(Tensor& t, const Tensor& pre, Activation act) {
  for (std::size_t i = 0; i < t.data.size(); ++i)
    t.data[i] *= nn::activation_slope(act, pre.data[i]);
}

}  // namespace

double Critic::penalty_backward(std::span<const double> x, double scale) {
  Cache cache;
  forward(x, &cache);

  // Input gradient as an explicit chain so it can be differentiated again.
  // The critic is piecewise linear, so with the activation pattern fixed
  // the chain is linear in each weight tensor and independent of biases.
  Tensor v0(c2_.out_channels(), length_ / 4);
  v0.data = head_.weight();
  Tensor v2 = nn::maxpool2_backward(cache.p2, v0);
  scale_by_slope(v2, cache.c2.pre, c2_.activation());
  Tensor v3 = nn::conv_transpose(c2_, v2);
  Tensor v5 = nn::maxpool2_backward(cache.p1, v3);
  scale_by_slope(v5, cache.c1.pre, c1_.activation());
  Tensor gx = nn::conv_transpose(c1_, v5);

  double sq = 0.0;
  for (double v : gx.data) sq += v * v;
  const double norm = std::sqrt(sq);
  const double dev = norm - 1.0;
  if (norm == 0.0 || scale == 0.0) return dev * dev;

  Tensor bar_gx = gx;
  const double coef = scale * 2.0 * dev / norm;
  for (double& v : bar_gx.data) v *= coef;

  nn::conv_weight_grad_accumulate(c1_, bar_gx, v5, c1_.weight_grad());
  Tensor bar_v5 = nn::conv_linear(c1_, bar_gx);
  scale_by_slope(bar_v5, cache.c1.pre, c1_.activation());
  Tensor bar_v3 = nn::maxpool2_gather(cache.p1, bar_v5);
  nn::conv_weight_grad_accumulate(c2_, bar_v3, v2, c2_.weight_grad());
  Tensor bar_v2 = nn::conv_linear(c2_, bar_v3);
  scale_by_slope(bar_v2, cache.c2.pre, c2_.activation());
  Tensor bar_v0 = nn::maxpool2_gather(cache.p2, bar_v2);
  auto& gw = head_.weight_grad();
  for (std::size_t i = 0; i < gw.size(); ++i) gw[i] += bar_v0.data[i];
  return dev * dev;
}

void Critic::zero_grad() {
  c1_.zero_grad();
  c2_.zero_grad();
  head_.zero_grad();
}

void Critic::append_blocks(std::vector<nn::ParamBlock>& out) {
  c1_.append_blocks(out);
  c2_.append_blocks(out);
  head_.append_blocks(out);
}

// ---------------------------------------------------------------------------
// Training

namespace {

void require_finite_loss(double v, const char* name, long step) {
  if (!std::isfinite(v)) {
    fail(ErrorKind::kTraining, std::string("training diverged: ") + name +
                                   " is non-finite at step " +
                                   std::to_string(step));
  }
}

}  // namespace

SigrModel train_sigr(std::span<const CyclePair> pairs, const TrainSpec& spec) {
  spec.validate();
  const auto batch = static_cast<std::size_t>(spec.batch_size);
  require(pairs.size() >= batch, ErrorKind::kParameter,
          "train: need at least batch_size cycle pairs, got " +
              std::to_string(pairs.size()));
  for (const auto& p : pairs) {
    p.rppg.validate();
    p.ppg.validate();
  }
  const std::size_t len = pairs.front().rppg.samples.size();

  SigrModel model;
  model.spec = spec;
  nn::Rng rng(spec.rng_seed);
  model.generator.init(rng);
  model.critic.init(rng);

  std::vector<nn::ParamBlock> gblocks, cblocks;
  model.generator.append_blocks(gblocks);
  model.critic.append_blocks(cblocks);
  const nn::AdamSpec adam{spec.learning_rate, spec.adam_beta1, spec.adam_beta2,
                          1e-8};
  nn::Adam gopt(std::move(gblocks), adam);
  nn::Adam copt(std::move(cblocks), adam);

  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double inv_b = 1.0 / static_cast<double>(batch);
  const std::size_t steps_per_epoch = pairs.size() / batch;

  Generator::Cache gcache;
  Critic::Cache ccache;
  std::vector<double> mix(len);
  long step = 0;
  for (int epoch = 0; epoch < spec.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t s = 0; s < steps_per_epoch; ++s) {
      if (spec.max_steps > 0 && step >= spec.max_steps) break;
      LossRecord rec;
      rec.step = step;

      for (int k = 0; k < spec.critic_steps_per_gen_step; ++k) {
        copt.zero_grad();
        double fake_sum = 0.0, real_sum = 0.0, gp_sum = 0.0;
        for (std::size_t b = 0; b < batch; ++b) {
          const auto& pr = pairs[pick(rng)];
          const auto fake = model.generator.forward(pr.rppg.samples);
          fake_sum += model.critic.forward(fake, &ccache);
          model.critic.backward(ccache, inv_b);
          real_sum += model.critic.forward(pr.ppg.samples, &ccache);
          model.critic.backward(ccache, -inv_b);
          const double eps = unit(rng);
          for (std::size_t i = 0; i < len; ++i)
            mix[i] = eps * pr.ppg.samples[i] + (1.0 - eps) * fake[i];
          gp_sum += model.critic.penalty_backward(mix, spec.gp_lambda * inv_b);
        }
        rec.gp = gp_sum * inv_b;
        rec.critic_loss = (fake_sum - real_sum) * inv_b + spec.gp_lambda * rec.gp;
        require_finite_loss(rec.critic_loss, "critic loss", step);
        copt.step();
      }

      gopt.zero_grad();
      double score_sum = 0.0, l1_sum = 0.0;
      const double l1_scale = spec.rec_lambda * inv_b / static_cast<double>(len);
      for (std::size_t b = 0; b < batch; ++b) {
        const auto& pr = pairs[order[s * batch + b]];
        const auto fake = model.generator.forward(pr.rppg.samples, &gcache);
        score_sum += model.critic.forward(fake, &ccache);
        auto grad = model.critic.backward(ccache, -inv_b, false);
        for (std::size_t i = 0; i < len; ++i) {
          const double diff = fake[i] - pr.ppg.samples[i];
          l1_sum += std::abs(diff);
          grad[i] += l1_scale * static_cast<double>((diff > 0.0) - (diff < 0.0));
        }
        model.generator.backward(gcache, grad);
      }
      rec.rec_l1 = l1_sum * inv_b / static_cast<double>(len);
      rec.gen_loss = -score_sum * inv_b + spec.rec_lambda * rec.rec_l1;
      require_finite_loss(rec.gen_loss, "generator loss", step);
      gopt.step();
      model.history.push_back(rec);
      ++step;
    }
  }
  return model;
}

// ---------------------------------------------------------------------------
// Inference

std::vector<double> restore_profile(const Generator& generator,
                                    std::span<const BeatCycle> cycles,
                                    const SavGolSpec& savgol) {
  require(!cycles.empty(), ErrorKind::kParameter, "restore: no cycles given");
  savgol.validate();
  std::vector<double> mean;
  for (const auto& c : cycles) {
    c.validate();
    const auto smoothed = savgol_smooth(generator.forward(c.samples), savgol);
    if (mean.empty()) mean.assign(smoothed.size(), 0.0);
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += smoothed[i];
  }
  const double inv = 1.0 / static_cast<double>(cycles.size());
  for (double& v : mean) v *= inv;
  return mean;
}

BeatCycle restore(const Generator& generator, std::span<const BeatCycle> cycles,
                  const SavGolSpec& savgol) {
  const auto profile = restore_profile(generator, cycles, savgol);
  BeatCycle out;
  out.samples = normalize_cycle(profile);
  out.source_label = SignalLabel::kRestored;
  out.subject_id = cycles.front().subject_id;
  out.cycle_index = cycles.size() == 1 ? cycles.front().cycle_index : 0;
  out.onset_s = cycles.front().onset_s;
  out.duration_s = cycles.front().duration_s;
  return out;
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

constexpr std::string_view kSigrMagic = "SIGR1";

void write_conv_header(ByteWriter& w, const Conv1d& c) {
  w.u64(c.in_channels());
  w.u64(c.out_channels());
  w.u64(c.kernel_len());
  w.u64(static_cast<std::uint64_t>(c.activation()));
}

void check_conv_header(ByteReader& r, const Conv1d& c) {
  const auto in = r.u64(), out = r.u64(), k = r.u64(), act = r.u64();
  require(in == c.in_channels() && out == c.out_channels() &&
              k == c.kernel_len() &&
              act == static_cast<std::uint64_t>(c.activation()),
          ErrorKind::kParse, "model file: layer dimensions do not match");
}

void write_conv_params(ByteWriter& w, const Conv1d& c) {
  w.f64s(c.weight());
  w.f64s(c.bias());
}

void read_conv_params(ByteReader& r, Conv1d& c) {
  r.f64s(c.weight());
  r.f64s(c.bias());
  c.validate();
}

}  // namespace

void save_sigr(const SigrModel& model, const std::filesystem::path& path) {
  ByteWriter w;
  w.raw(kSigrMagic);
  w.u64(model.critic.cycle_length());
  w.u64(Generator::kLayers);
  for (const auto& l : model.generator.layers()) write_conv_header(w, l);
  w.u64(2);
  write_conv_header(w, model.critic.conv1());
  write_conv_header(w, model.critic.conv2());
  w.u64(model.critic.head().in_size());
  w.u64(model.critic.head().out_size());
  for (const auto& l : model.generator.layers()) write_conv_params(w, l);
  write_conv_params(w, model.critic.conv1());
  write_conv_params(w, model.critic.conv2());
  w.f64s(model.critic.head().weight());
  w.f64s(model.critic.head().bias());
  w.raw(model.spec.to_key_values());
  write_file(path, w.bytes());
}

SigrModel load_sigr(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  ByteReader r(bytes);
  require(r.raw(kSigrMagic.size()) == kSigrMagic, ErrorKind::kParse,
          path.string() + ": not a SIGR1 model file");
  const auto length = r.u64();
  require(length == kCycleLength, ErrorKind::kParse,
          "model file: unsupported cycle length");
  SigrModel m;
  require(r.u64() == Generator::kLayers, ErrorKind::kParse,
          "model file: unexpected generator depth");
  for (const auto& l : m.generator.layers()) check_conv_header(r, l);
  require(r.u64() == 2, ErrorKind::kParse, "model file: unexpected critic depth");
  check_conv_header(r, m.critic.conv1());
  check_conv_header(r, m.critic.conv2());
  require(r.u64() == m.critic.head().in_size() &&
              r.u64() == m.critic.head().out_size(),
          ErrorKind::kParse, "model file: critic head mismatch");
  for (auto& l : m.generator.layers()) read_conv_params(r, l);
  read_conv_params(r, m.critic.conv1());
  read_conv_params(r, m.critic.conv2());
  r.f64s(m.critic.head().weight());
  r.f64s(m.critic.head().bias());
  m.spec = TrainSpec::from_key_values(r.rest());
  return m;
}

void write_loss_history_csv(std::span<const LossRecord> history,
                            const std::filesystem::path& path) {
  std::string out = "step,critic_loss,gen_loss,gp,rec_l1\n";
  for (const auto& r : history) {
    out += std::to_string(r.step) + ',' + format_double(r.critic_loss) + ',' +
           format_double(r.gen_loss) + ',' + format_double(r.gp) + ',' +
           format_double(r.rec_l1) + '\n';
  }
  write_file(path, out);
}

}  // namespace ppgspoof
