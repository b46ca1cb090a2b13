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

#include "auth.hpp"
#include "errors.hpp"
#include "fixtures.hpp"
#include "metrics.hpp"
#include "serialize.hpp"

using namespace ppgspoof;

namespace {

constexpr std::size_t L = kCycleLength;
using fixture::ramps;

double accuracy(const AuthModel& m, std::span<const BeatCycle> pos, std::span<const BeatCycle> neg) {
  std::size_t ok = 0;
  for (const auto& c : pos) ok += clean_logit(m, c) >= 0.0;
  for (const auto& c : neg) ok += clean_logit(m, c) < 0.0;
  return static_cast<double>(ok) / static_cast<double>(pos.size() + neg.size());
}

AuthSpec toy_spec() { return fixture::toy_auth_spec(); }
const fixture::ToyAuth& toy() { return fixture::toy_auth(); }

}  // namespace

TEST_SUITE("auth") {

TEST_CASE("architecture") {
  AuthNet net;
  CHECK(net.conv1().in_channels() == 1);
  CHECK(net.conv1().out_channels() == 16);
  CHECK(net.conv1().kernel_len() == 5);
  CHECK(net.conv2().out_channels() == 32);
  CHECK(net.conv2().kernel_len() == 5);
  CHECK(net.lstm().hidden_size() == 32);
  CHECK(net.lstm().input_size() == 32);
  CHECK(net.head().in_size() == 32);
  CHECK(net.head().out_size() == 1);
}

TEST_CASE("split is disjoint, sized and stratified") {
  const auto& d = toy().data;
  CHECK(d.victim_train.size() == 56);
  CHECK(d.victim_test.size() == 24);
  CHECK(d.other_train.size() == 40);
  CHECK(d.other_test.size() == 40);
  std::size_t from_a = 0;
  for (const auto& c : d.other_train) from_a += c.subject_id == "a";
  CHECK(from_a == 20);
  for (const auto& tr : d.victim_train)
    for (const auto& te : d.victim_test) CHECK(tr.cycle_index != te.cycle_index);
}

TEST_CASE("separable ramps are learned") {
  const auto& t = toy();
  CHECK(accuracy(t.model, t.data.victim_test, t.data.other_test) > 0.95);
  // A victim training cycle is accepted once calibrated.
  AuthModel m = t.model;
  calibrate(m, t.data.victim_test, t.data.other_test, 0.02);
  CHECK(authenticate(m, t.data.victim_train.front()).accept);
}

TEST_CASE("training is deterministic for a fixed seed") {
  const auto& t = toy();
  const AuthModel again = train_auth(t.data, toy_spec());
  for (const auto& c : t.data.victim_test) CHECK(clean_logit(again, c) == clean_logit(t.model, c));
}

TEST_CASE("shuffled labels give chance accuracy") {
  auto pool = ramps(60, true, "x", 5);
  const auto down = ramps(60, false, "y", 6);
  pool.insert(pool.end(), down.begin(), down.end());
  std::mt19937_64 rng(7);
  std::shuffle(pool.begin(), pool.end(), rng);
  const std::span<const BeatCycle> all(pool);
  const auto pos_train = all.subspan(0, 40), neg_train = all.subspan(40, 40);
  const auto pos_test = all.subspan(80, 20), neg_test = all.subspan(100, 20);
  const AuthModel m = train_auth(pos_train, neg_train, toy_spec());
  const double acc = accuracy(m, pos_test, neg_test);
  CHECK(acc >= 0.35);
  CHECK(acc <= 0.65);
}

TEST_CASE("train_auth rejects a single class") {
  const auto v = ramps(5, true, "v", 1);
  try {
    train_auth(v, std::span<const BeatCycle>{}, AuthSpec{});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kParameter);
  }
}

TEST_CASE("calibration examples") {
  AuthModel m = toy().model;
  auto r = calibrate_scores(m, std::vector<double>{0.9, 0.8}, std::vector<double>{0.1, 0.2}, 0.02);
  CHECK(r.eer == 0.0);
  CHECK(r.noise_sigma == 0.0);
  CHECK(m.threshold > 0.2);
  CHECK(m.threshold < 0.8);

  m = toy().model;
  r = calibrate_scores(m, std::vector<double>{0.6, 0.4}, std::vector<double>{0.5, 0.3}, 0.49);
  CHECK(r.eer == doctest::Approx(0.5));

  // Too weak for the target: noise cannot lower the EER.
  m = toy().model;
  try {
    calibrate_scores(m, std::vector<double>{0.6, 0.4}, std::vector<double>{0.5, 0.3}, 0.14);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kCalibration);
    CHECK(std::string(e.what()).find("0.5") != std::string::npos);
  }
}

TEST_CASE("a perfect model is detuned to the target with noise") {
  const auto& t = toy();
  AuthModel m = t.model;
  const auto r = calibrate(m, t.data.victim_test, t.data.other_test, 0.14);
  CHECK(r.noise_sigma > 0.0);
  CHECK(std::abs(r.eer - 0.14) <= 0.03);
  CHECK(m.calibrated());
  CHECK(m.eer == r.eer);

  // The EER at the stored threshold agrees with the reported one to a grid step.
  std::vector<double> gs, is;
  for (const auto& c : t.data.victim_test) gs.push_back(score(m, c));
  for (const auto& c : t.data.other_test) is.push_back(score(m, c));
  double far = 0.0, frr = 0.0;
  for (double s : is) far += s >= m.threshold;
  for (double s : gs) frr += s < m.threshold;
  far /= static_cast<double>(is.size());
  frr /= static_cast<double>(gs.size());
  const double step = 1.0 / static_cast<double>(std::min(gs.size(), is.size()));
  CHECK(std::abs(far - r.eer) <= step + 1e-12);
  CHECK(std::abs(frr - r.eer) <= step + 1e-12);
  CHECK(far_frr_eer(gs, is).eer == doctest::Approx(r.eer).epsilon(1e-12));
}

TEST_CASE("authenticate: tie rule, monotonicity, purity, usage errors") {
  const auto& t = toy();
  AuthModel m = t.model;
  const BeatCycle& c = t.data.other_test.front();
  try {
    authenticate(m, c);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kUsage);
  }
  calibrate(m, t.data.victim_test, t.data.other_test, 0.14);
  const Decision d = authenticate(m, c);
  CHECK(d.score > 0.0);
  CHECK(d.score < 1.0);
  CHECK(authenticate(m, c).score == d.score);

  AuthModel at = m;
  at.threshold = d.score;
  CHECK(authenticate(at, c).accept);

  std::vector<BeatCycle> probes = t.data.victim_test;
  probes.insert(probes.end(), t.data.other_test.begin(), t.data.other_test.end());
  AuthModel hi = m;
  for (double thr : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    AuthModel lo = m;
    lo.threshold = thr;
    hi.threshold = thr + 0.05;
    for (const auto& p : probes)
      if (!authenticate(lo, p).accept) CHECK_FALSE(authenticate(hi, p).accept);
  }

  BeatCycle bad = c;
  bad.samples.assign(L, 0.0);
  CHECK_THROWS_AS(authenticate(m, bad), Error);
  CHECK_THROWS_AS(make_cycle(std::vector<double>(L, 0.0), SignalLabel::kPpg, "z", 0), Error);
}

TEST_CASE("AUTH1 container round-trips") {
  AuthModel m = toy().model;
  calibrate(m, toy().data.victim_test, toy().data.other_test, 0.14);
  const auto dir = std::filesystem::temp_directory_path() / "ppgspoof_auth_test";
  std::filesystem::create_directories(dir);
  save_auth(m, dir / "a.auth");
  CHECK(read_file(dir / "a.auth").substr(0, 5) == "AUTH1");
  const AuthModel back = load_auth(dir / "a.auth");
  CHECK(back.threshold == m.threshold);
  CHECK(back.noise_sigma == m.noise_sigma);
  CHECK(back.noise_seed == m.noise_seed);
  CHECK(back.spec.to_key_values() == m.spec.to_key_values());
  for (const auto& c : toy().data.other_test) CHECK(score(back, c) == score(m, c));
  write_file(dir / "sigr.auth", "SIGR1" + read_file(dir / "a.auth").substr(5));
  CHECK_THROWS_AS(load_auth(dir / "sigr.auth"), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("auth spec validation") {
  AuthSpec s;
  CHECK(AuthSpec::from_key_values(s.to_key_values()).to_key_values() == s.to_key_values());
  s.target_eer = 0.6;
  CHECK_THROWS_AS(s.validate(), Error);
  s = AuthSpec{};
  s.other_train_fraction = 0.0;
  CHECK_THROWS_AS(s.validate(), Error);
  CHECK_THROWS_AS(AuthSpec::from_key_values("nope=1\n"), Error);
}

}  // TEST_SUITE
