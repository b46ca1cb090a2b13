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

#include <doctest.h>

#include <filesystem>
#include <random>

#include "errors.hpp"
#include "oracles.hpp"
#include "serialize.hpp"
#include "sigr.hpp"
#include "synth.hpp"

using namespace ppgspoof;

namespace {

constexpr std::size_t L = kCycleLength;

BeatCycle cycle_from(const std::vector<double>& raw, int index = 0) {
  return make_cycle(raw, SignalLabel::kRppg, "t", index);
}

std::vector<BeatCycle> pulse_cycles(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<BeatCycle> out;
  for (int i = 0; i < n; ++i) {
    PulseShape p;
    p.c1 = 0.18 + 0.08 * u(rng);
    p.c2 = 0.45 + 0.1 * u(rng);
    p.a2 = 0.3 + 0.3 * u(rng);
    std::vector<double> raw(L);
    for (std::size_t k = 0; k < L; ++k) raw[k] = pulse_value(p, static_cast<double>(k) / L);
    out.push_back(cycle_from(raw, i));
  }
  return out;
}

std::vector<CyclePair> identity_pairs(const std::vector<BeatCycle>& cs) {
  std::vector<CyclePair> out;
  for (const auto& c : cs) out.push_back({c, c});
  return out;
}

struct LinearCritic {
  std::vector<double> w;
  std::vector<double> input_gradient(std::span<const double>) const { return w; }
};

double mean_l1(const Generator& g, const std::vector<BeatCycle>& cs) {
  double s = 0.0;
  for (const auto& c : cs) {
    const auto y = g.forward(c.samples);
    for (std::size_t k = 0; k < L; ++k) s += std::abs(y[k] - c.samples[k]);
  }
  return s / static_cast<double>(cs.size() * L);
}

std::vector<double> flat_params(SigrModel& m) {
  std::vector<nn::ParamBlock> blocks;
  m.generator.append_blocks(blocks);
  m.critic.append_blocks(blocks);
  std::vector<double> out;
  for (const auto& b : blocks) out.insert(out.end(), b.value.begin(), b.value.end());
  return out;
}

}  // namespace

TEST_SUITE("sigr") {

TEST_CASE("generator and critic shapes") {
  Generator g;
  const auto& ls = g.layers();
  CHECK(ls[0].in_channels() == 1);
  CHECK(ls[0].out_channels() == 32);
  CHECK(ls[1].out_channels() == 64);
  CHECK(ls[2].out_channels() == 32);
  CHECK(ls[3].out_channels() == 1);
  for (const auto& l : ls) CHECK(l.kernel_len() == 7);
  CHECK(ls[2].activation() == nn::Activation::kLeakyRelu);
  CHECK(ls[3].activation() == nn::Activation::kLinear);
  Critic c;
  CHECK(c.conv1().out_channels() == 32);
  CHECK(c.conv2().out_channels() == 64);
  CHECK(c.head().in_size() == 64 * L / 4);
  CHECK(c.head().out_size() == 1);
  nn::Rng rng(1);
  g.init(rng);
  CHECK(g.forward(std::vector<double>(L, 0.5)).size() == L);
}

TEST_CASE("identity generator with window-1 smoothing restores the input") {
  const auto cs = pulse_cycles(1, 3);
  const BeatCycle r = restore(Generator::identity(), cs, SavGolSpec{1, 0});
  CHECK(r.source_label == SignalLabel::kRestored);
  for (std::size_t k = 0; k < L; ++k) CHECK(r.samples[k] == doctest::Approx(cs[0].samples[k]).epsilon(1e-12));
}

TEST_CASE("restoring K identical cycles equals restoring one") {
  nn::Rng rng(2);
  Generator g;
  g.init(rng);
  const auto one = pulse_cycles(1, 4);
  const std::vector<BeatCycle> many(5, one[0]);
  const auto a = restore(g, one, SavGolSpec{});
  const auto b = restore(g, many, SavGolSpec{});
  for (std::size_t k = 0; k < L; ++k) CHECK(a.samples[k] == doctest::Approx(b.samples[k]).epsilon(1e-12));
}

TEST_CASE("ramp up and ramp down average to a constant 0.5") {
  std::vector<double> up(L), down(L);
  for (std::size_t k = 0; k < L; ++k) {
    up[k] = static_cast<double>(k) / (L - 1);
    down[k] = 1.0 - up[k];
  }
  const std::vector<BeatCycle> cs = {cycle_from(up), cycle_from(down)};
  const auto prof = restore_profile(Generator::identity(), cs, SavGolSpec{1, 0});
  for (double v : prof) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
  // A constant profile cannot be renormalised.
  CHECK_THROWS_AS(restore(Generator::identity(), cs, SavGolSpec{1, 0}), Error);
}

TEST_CASE("restore output always satisfies cycle invariants") {
  nn::Rng rng(6);
  Generator g;
  g.init(rng);
  const auto cs = pulse_cycles(20, 5);
  for (std::size_t n = 1; n <= cs.size(); n += 3) {
    const auto r = restore(g, std::span(cs).first(n), SavGolSpec{});
    CHECK_NOTHROW(r.validate());
  }
  CHECK_THROWS_AS(restore(g, std::span<const BeatCycle>{}, SavGolSpec{}), Error);
}

TEST_CASE("gradient penalty of linear critics") {
  nn::Rng rng(1);
  std::vector<std::vector<double>> real(4, std::vector<double>(L)), fake(4, std::vector<double>(L));
  std::normal_distribution<double> nd;
  for (auto* b : {&real, &fake})
    for (auto& v : *b)
      for (double& x : v) x = nd(rng);
  std::vector<double> w(L);
  for (double& x : w) x = nd(rng);
  double norm = 0.0;
  for (double x : w) norm += x * x;
  norm = std::sqrt(norm);
  LinearCritic unit{w}, three{w};
  for (double& x : unit.w) x /= norm;
  for (double& x : three.w) x *= 3.0 / norm;
  CHECK(gradient_penalty(unit, real, fake, rng) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(gradient_penalty(three, real, fake, rng) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("critic input gradient and penalty match finite differences") {
  nn::Rng rng(14);
  Critic c;
  c.init(rng);
  std::vector<double> x(L);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double& v : x) v = u(rng);
  auto f = [&] { return c.forward(x); };
  const auto num = oracle::numeric_gradient(f, x);
  const auto ana = c.input_gradient(x);
  for (std::size_t i = 0; i < L; ++i) CHECK(oracle::rel_err(ana[i], num[i]) < 1e-4);

  // Penalty from finite-difference input gradients.
  double nn2 = 0.0;
  for (double g : num) nn2 += g * g;
  const double fd_penalty = (std::sqrt(nn2) - 1.0) * (std::sqrt(nn2) - 1.0);
  std::vector<std::vector<double>> real = {x}, fake = {x};
  CHECK(oracle::rel_err(gradient_penalty(c, real, fake, rng), fd_penalty) < 1e-3);
}

TEST_CASE("penalty parameter gradient matches finite differences") {
  nn::Rng rng(15);
  Critic c(16);
  c.init(rng);
  std::vector<double> x(16);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double& v : x) v = u(rng);
  c.zero_grad();
  c.penalty_backward(x, 1.0);
  std::vector<nn::ParamBlock> blocks;
  c.append_blocks(blocks);
  auto penalty = [&] {
    const auto g = c.input_gradient(x);
    double n2 = 0.0;
    for (double v : g) n2 += v * v;
    return (std::sqrt(n2) - 1.0) * (std::sqrt(n2) - 1.0);
  };
  int checked = 0;
  for (auto& b : blocks) {
    for (std::size_t i = 0; i < b.value.size(); i += 7) {
      const double keep = b.value[i];
      b.value[i] = keep + 1e-5;
      const double fp = penalty();
      b.value[i] = keep - 1e-5;
      const double fm = penalty();
      b.value[i] = keep;
      const double num = (fp - fm) / 2e-5;
      if (std::abs(num) < 1e-7 && std::abs(b.grad[i]) < 1e-7) continue;
      CHECK(oracle::rel_err(b.grad[i], num) < 1e-4);
      ++checked;
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("generator composite gradient matches finite differences") {
  nn::Rng rng(16);
  Generator g;
  g.init(rng);
  std::vector<double> x(L), w(L);
  std::normal_distribution<double> nd;
  for (double& v : x) v = nd(rng);
  for (double& v : w) v = nd(rng);
  auto f = [&] {
    const auto y = g.forward(x);
    double s = 0.0;
    for (std::size_t i = 0; i < L; ++i) s += y[i] * w[i];
    return s;
  };
  Generator::Cache cache;
  g.forward(x, &cache);
  g.zero_grad();
  const auto gx = g.backward(cache, w);
  const auto nx = oracle::numeric_gradient(f, x);
  for (std::size_t i = 0; i < L; ++i) CHECK(oracle::rel_err(gx[i], nx[i]) < 1e-4);
  std::vector<nn::ParamBlock> blocks;
  g.append_blocks(blocks);
  for (auto& b : blocks)
    for (std::size_t i = 0; i < b.value.size(); i += 97) {
      const double keep = b.value[i];
      b.value[i] = keep + 1e-5;
      const double fp = f();
      b.value[i] = keep - 1e-5;
      const double fm = f();
      b.value[i] = keep;
      CHECK(oracle::rel_err(b.grad[i], (fp - fm) / 2e-5) < 1e-4);
    }
}

TEST_CASE("identity task: loss halves and held-out L1 drops below 0.05") {
  const auto train = pulse_cycles(96, 21), held = pulse_cycles(32, 22);
  TrainSpec spec;
  spec.epochs = 1000;
  spec.max_steps = 200;
  const SigrModel m = train_sigr(identity_pairs(train), spec);
  REQUIRE(m.history.size() == 200);
  CHECK(m.history.back().rec_l1 <= 0.5 * m.history.front().rec_l1);
  CHECK(mean_l1(m.generator, held) < 0.05);
}

TEST_CASE("training is bit-reproducible and the container round-trips") {
  const auto cs = pulse_cycles(12, 30);
  TrainSpec spec;
  spec.batch_size = 4;
  spec.epochs = 2;
  spec.rng_seed = 99;
  SigrModel a = train_sigr(identity_pairs(cs), spec);
  SigrModel b = train_sigr(identity_pairs(cs), spec);
  CHECK(flat_params(a) == flat_params(b));
  CHECK(a.history.size() == 6);  // 3 steps per epoch

  spec.rng_seed = 100;
  SigrModel c = train_sigr(identity_pairs(cs), spec);
  CHECK(flat_params(a) != flat_params(c));

  const auto dir = std::filesystem::temp_directory_path() / "ppgspoof_sigr_test";
  std::filesystem::create_directories(dir);
  save_sigr(a, dir / "m.sigr");
  SigrModel back = load_sigr(dir / "m.sigr");
  CHECK(flat_params(back) == flat_params(a));
  CHECK(back.spec.to_key_values() == a.spec.to_key_values());
  CHECK(read_file(dir / "m.sigr").substr(0, 5) == "SIGR1");

  write_loss_history_csv(a.history, dir / "loss.csv");
  CHECK(read_file(dir / "loss.csv").rfind("step,critic_loss,gen_loss,gp,rec_l1\n", 0) == 0);

  std::string bytes = read_file(dir / "m.sigr");
  bytes[0] = 'X';
  write_file(dir / "bad.sigr", bytes);
  try {
    load_sigr(dir / "bad.sigr");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kParse);
  }
  write_file(dir / "short.sigr", read_file(dir / "m.sigr").substr(0, 100));
  CHECK_THROWS_AS(load_sigr(dir / "short.sigr"), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("train spec validation and key=value round trip") {
  TrainSpec s;
  s.gp_lambda = 3.5;
  s.max_steps = 17;
  CHECK(TrainSpec::from_key_values(s.to_key_values()).to_key_values() == s.to_key_values());
  TrainSpec bad;
  bad.adam_beta1 = 1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = TrainSpec{};
  bad.batch_size = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = TrainSpec{};
  bad.rec_lambda = -1;
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK_THROWS_AS(TrainSpec::from_key_values("bogus=1\n"), Error);
}

TEST_CASE("training needs a full batch and finite data") {
  const auto cs = pulse_cycles(5, 1);
  TrainSpec spec;
  try {
    train_sigr(identity_pairs(cs), spec);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kParameter);
  }
  TrainSpec blowup;
  blowup.batch_size = 4;
  blowup.learning_rate = 1e300;
  blowup.epochs = 50;
  try {
    train_sigr(identity_pairs(cs), blowup);
    FAIL("expected a training failure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kTraining);
  }
}

}  // TEST_SUITE
