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

#include <random>

#include "errors.hpp"
#include "nn.hpp"
#include "oracles.hpp"

using namespace ppgspoof;
using namespace ppgspoof::nn;

namespace {

Tensor random_tensor(std::size_t c, std::size_t l, Rng& rng) {
  std::normal_distribution<double> nd;
  Tensor t(c, l);
  for (double& v : t.data) v = nd(rng);
  return t;
}

std::vector<std::vector<double>> rows(const Tensor& t) {
  std::vector<std::vector<double>> out;
  for (std::size_t c = 0; c < t.channels; ++c) out.emplace_back(t.row(c).begin(), t.row(c).end());
  return out;
}

void randomize(std::vector<double>& v, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 0.5);
  for (double& x : v) x = nd(rng);
}

double weighted_sum(const Tensor& t, const Tensor& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < t.data.size(); ++i) s += t.data[i] * w.data[i];
  return s;
}

// Keeps inputs clear of the LeakyReLU kink so finite differences are valid.
bool near_kink(const ConvCache& c, double h) {
  for (double v : c.pre.data)
    if (std::abs(v) < 10 * h) return true;
  return false;
}

}  // namespace

TEST_SUITE("nn") {

TEST_CASE("conv identity kernel and constant bias") {
  Conv1d id(1, 1, 7, Activation::kLinear);
  id.weight() = {0, 0, 0, 1, 0, 0, 0};
  id.bias() = {0};
  Rng rng(1);
  const Tensor x = random_tensor(1, 64, rng);
  CHECK(conv_forward(id, x).data == x.data);

  Conv1d zb(1, 1, 7, Activation::kLinear);
  zb.bias() = {0.37};
  for (double v : conv_forward(zb, x).data) CHECK(v == 0.37);
}

TEST_CASE("conv forward matches the triple-loop oracle") {
  Rng rng(7);
  struct Shape {
    std::size_t in, out, k, len;
  };
  for (const Shape s : {Shape{1, 32, 7, 64}, Shape{32, 64, 7, 32}, Shape{64, 32, 7, 64},
                        Shape{3, 5, 5, 9}, Shape{2, 2, 3, 4}, Shape{4, 1, 7, 5}}) {
    for (Activation act : {Activation::kLinear, Activation::kLeakyRelu}) {
      Conv1d layer(s.in, s.out, s.k, act);
      randomize(layer.weight(), rng);
      randomize(layer.bias(), rng);
      const Tensor x = random_tensor(s.in, s.len, rng);
      const auto want = oracle::conv1d(layer.weight(), layer.bias(), rows(x), s.out, s.k);
      const Tensor got = conv_forward(layer, x);
      REQUIRE(got.channels == s.out);
      REQUIRE(got.length == s.len);
      double worst = 0.0;
      for (std::size_t o = 0; o < s.out; ++o)
        for (std::size_t t = 0; t < s.len; ++t)
          worst = std::max(worst, std::abs(got.at(o, t) - activate(act, want[o][t])));
      CHECK(worst <= 1e-12);
    }
  }
}

TEST_CASE("conv transpose is the adjoint of conv_linear") {
  Rng rng(8);
  Conv1d layer(3, 4, 5, Activation::kLinear);
  randomize(layer.weight(), rng);
  const Tensor x = random_tensor(3, 11, rng), g = random_tensor(4, 11, rng);
  // <conv(x), g> == <x, conv^T(g)>
  CHECK(weighted_sum(conv_linear(layer, x), g) ==
        doctest::Approx(weighted_sum(x, conv_transpose(layer, g))).epsilon(1e-12));
}

TEST_CASE("conv gradients match central differences") {
  Rng rng(9);
  for (Activation act : {Activation::kLinear, Activation::kLeakyRelu}) {
    Conv1d layer(3, 4, 5, act);
    randomize(layer.weight(), rng);
    randomize(layer.bias(), rng);
    Tensor x = random_tensor(3, 12, rng);
    const Tensor w = random_tensor(4, 12, rng);
    ConvCache cache;
    conv_forward(layer, x, &cache);
    if (act == Activation::kLeakyRelu && near_kink(cache, 1e-5)) continue;
    layer.zero_grad();
    const Tensor gx = conv_backward(layer, cache, w);
    auto loss = [&] { return weighted_sum(conv_forward(layer, x), w); };
    const auto nw = oracle::numeric_gradient(loss, layer.weight());
    const auto nb = oracle::numeric_gradient(loss, layer.bias());
    const auto nx = oracle::numeric_gradient(loss, x.data);
    for (std::size_t i = 0; i < nw.size(); ++i) CHECK(oracle::rel_err(layer.weight_grad()[i], nw[i]) < 1e-4);
    for (std::size_t i = 0; i < nb.size(); ++i) CHECK(oracle::rel_err(layer.bias_grad()[i], nb[i]) < 1e-4);
    for (std::size_t i = 0; i < nx.size(); ++i) CHECK(oracle::rel_err(gx.data[i], nx[i]) < 1e-4);
  }
}

TEST_CASE("leaky relu gradient below zero is 0.2 times upstream") {
  Conv1d id(1, 1, 1, Activation::kLeakyRelu);
  id.weight() = {1.0};
  Tensor x(1, 4);
  x.data = {-2.0, -0.5, 0.5, 3.0};
  ConvCache cache;
  const Tensor y = conv_forward(id, x, &cache);
  CHECK(y.data[0] == doctest::Approx(-0.4));
  Tensor up(1, 4, 1.5);
  const Tensor g = conv_backward(id, cache, up);
  CHECK(g.data[0] == doctest::Approx(0.2 * 1.5));
  CHECK(g.data[1] == doctest::Approx(0.2 * 1.5));
  CHECK(g.data[2] == doctest::Approx(1.5));
  CHECK(g.data[3] == doctest::Approx(1.5));
}

TEST_CASE("maxpool routes gradients to the argmax only") {
  Tensor x(2, 6);
  x.data = {1, 3, 5, 5, -1, -2,   /* ties route to the first index */
            0, 0, 7, 2, 4, 9};
  PoolCache cache;
  const Tensor y = maxpool2_forward(x, &cache);
  CHECK(y.data == std::vector<double>{3, 5, -1, 0, 7, 9});
  Tensor up(2, 3);
  up.data = {1, 2, 3, 4, 5, 6};
  const Tensor g = maxpool2_backward(cache, up);
  CHECK(g.data == std::vector<double>{0, 1, 2, 0, 3, 0, 4, 0, 5, 0, 0, 6});
  CHECK(maxpool2_gather(cache, g).data == up.data);
}

TEST_CASE("affine gradients match central differences") {
  Rng rng(10);
  Affine a(6, 3);
  randomize(a.weight(), rng);
  randomize(a.bias(), rng);
  std::vector<double> x(6), w(3);
  randomize(x, rng);
  randomize(w, rng);
  auto loss = [&] {
    const auto y = a.forward(x);
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i) s += y[i] * w[i];
    return s;
  };
  a.zero_grad();
  const auto gx = a.backward(x, w);
  const auto nw = oracle::numeric_gradient(loss, a.weight());
  const auto nx = oracle::numeric_gradient(loss, x);
  for (std::size_t i = 0; i < nw.size(); ++i) CHECK(oracle::rel_err(a.weight_grad()[i], nw[i]) < 1e-4);
  for (std::size_t i = 0; i < nx.size(); ++i) CHECK(oracle::rel_err(gx[i], nx[i]) < 1e-4);
  for (std::size_t i = 0; i < 3; ++i) CHECK(a.bias_grad()[i] == doctest::Approx(w[i]));
}

TEST_CASE("lstm gradients match central differences") {
  Rng rng(12);
  Lstm lstm(4, 5);
  lstm.init_glorot(rng);
  randomize(lstm.bias(), rng);
  Tensor seq = random_tensor(4, 7, rng);
  std::vector<double> w(5);
  randomize(w, rng);
  auto loss = [&] {
    const auto h = lstm.forward(seq);
    double s = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) s += h[i] * w[i];
    return s;
  };
  Lstm::Cache cache;
  lstm.forward(seq, &cache);
  lstm.zero_grad();
  const Tensor gx = lstm.backward(cache, w);
  std::vector<ParamBlock> blocks;
  lstm.append_blocks(blocks);
  for (auto& b : blocks) {
    std::vector<double> v(b.value.begin(), b.value.end());
    auto f = [&] {
      std::copy(v.begin(), v.end(), b.value.begin());
      return loss();
    };
    const auto n = oracle::numeric_gradient(f, v);
    std::copy(v.begin(), v.end(), b.value.begin());
    for (std::size_t i = 0; i < n.size(); ++i) CHECK(oracle::rel_err(b.grad[i], n[i]) < 1e-4);
  }
  const auto nx = oracle::numeric_gradient(loss, seq.data);
  for (std::size_t i = 0; i < nx.size(); ++i) CHECK(oracle::rel_err(gx.data[i], nx[i]) < 1e-4);
}

TEST_CASE("two-layer conv net gradients for every parameter") {
  Rng rng(13);
  Conv1d l1(1, 4, 7, Activation::kLeakyRelu), l2(4, 2, 7, Activation::kLinear);
  l1.init_glorot(rng);
  l2.init_glorot(rng);
  randomize(l1.bias(), rng);
  Tensor x = random_tensor(1, 16, rng);
  const Tensor w = random_tensor(2, 16, rng);
  auto loss = [&] { return weighted_sum(conv_forward(l2, conv_forward(l1, x)), w); };
  ConvCache c1, c2;
  const Tensor h = conv_forward(l1, x, &c1);
  conv_forward(l2, h, &c2);
  REQUIRE_FALSE(near_kink(c1, 1e-5));
  l1.zero_grad();
  l2.zero_grad();
  conv_backward(l1, c1, conv_backward(l2, c2, w));
  for (Conv1d* l : {&l1, &l2}) {
    const auto nw = oracle::numeric_gradient(loss, l->weight());
    const auto nb = oracle::numeric_gradient(loss, l->bias());
    for (std::size_t i = 0; i < nw.size(); ++i) CHECK(oracle::rel_err(l->weight_grad()[i], nw[i]) < 1e-4);
    for (std::size_t i = 0; i < nb.size(); ++i) CHECK(oracle::rel_err(l->bias_grad()[i], nb[i]) < 1e-4);
  }
}

TEST_CASE("backward without forward is a usage error") {
  Conv1d l(1, 1, 3, Activation::kLinear);
  try {
    conv_backward(l, ConvCache{}, Tensor(1, 4));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kUsage);
  }
  CHECK_THROWS_AS(maxpool2_backward(PoolCache{}, Tensor(1, 2)), Error);
  Lstm lstm(2, 2);
  CHECK_THROWS_AS(lstm.backward(Lstm::Cache{}, std::vector<double>{1, 1}), Error);
}

TEST_CASE("shape mismatch is a parameter error") {
  Conv1d l(2, 1, 3, Activation::kLinear);
  try {
    conv_forward(l, Tensor(3, 8));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kParameter);
  }
  CHECK_THROWS_AS(Conv1d(1, 1, 4, Activation::kLinear).validate(), Error);
  Affine a(3, 2);
  CHECK_THROWS_AS(a.forward(std::vector<double>{1, 2}), Error);
}

TEST_CASE("glorot init stays within its bound and is seeded") {
  Rng a(5), b(5);
  Conv1d x(32, 64, 7, Activation::kLeakyRelu), y(32, 64, 7, Activation::kLeakyRelu);
  x.init_glorot(a);
  y.init_glorot(b);
  CHECK(x.weight() == y.weight());
  const double bound = std::sqrt(6.0 / (32 * 7 + 64 * 7));
  for (double w : x.weight()) CHECK(std::abs(w) <= bound);
}

TEST_CASE("adam minimises a quadratic") {
  std::vector<double> v = {3.0, -2.0}, g(2);
  Adam opt({ParamBlock{v, g}}, AdamSpec{0.1, 0.9, 0.999, 1e-8});
  for (int i = 0; i < 500; ++i) {
    opt.zero_grad();
    g[0] = 2 * v[0];
    g[1] = 2 * v[1];
    opt.step();
  }
  CHECK(std::abs(v[0]) < 1e-2);
  CHECK(std::abs(v[1]) < 1e-2);
  CHECK(opt.steps_taken() == 500);
}

}  // TEST_SUITE
