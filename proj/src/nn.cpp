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

#include "nn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Core>

#include "errors.hpp"

namespace ppgspoof::nn {

Tensor from_samples(std::span<const double> samples) {
  Tensor t(1, samples.size());
  std::copy(samples.begin(), samples.end(), t.data.begin());
  return t;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

void fill_uniform(std::vector<double>& v, double limit, Rng& rng) {
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& x : v) x = dist(rng);
}

void require_usage(bool cond, const char* what) {
  require(cond, ErrorKind::kUsage, what);
}

}  // namespace

// ---------------------------------------------------------------------------

Conv1d::Conv1d(std::size_t in_channels, std::size_t out_channels,
               std::size_t kernel_len, Activation act)
    : in_(in_channels),
      out_(out_channels),
      k_(kernel_len),
      act_(act),
      w_(in_channels * out_channels * kernel_len, 0.0),
      b_(out_channels, 0.0),
      gw_(w_.size(), 0.0),
      gb_(b_.size(), 0.0) {
  require(kernel_len % 2 == 1, ErrorKind::kParameter,
          "conv: kernel length must be odd");
  require(in_channels > 0 && out_channels > 0, ErrorKind::kParameter,
          "conv: channel counts must be positive");
}

void Conv1d::init_glorot(Rng& rng) {
  const double fan = static_cast<double>((in_ + out_) * k_);
  fill_uniform(w_, std::sqrt(6.0 / fan), rng);
  std::fill(b_.begin(), b_.end(), 0.0);
}

void Conv1d::zero_grad() {
  std::fill(gw_.begin(), gw_.end(), 0.0);
  std::fill(gb_.begin(), gb_.end(), 0.0);
}

void Conv1d::append_blocks(std::vector<ParamBlock>& out) {
  out.push_back({w_, gw_});
  out.push_back({b_, gb_});
}

void Conv1d::validate() const {
  for (double v : w_)
    require(std::isfinite(v), ErrorKind::kDataValidity,
            "conv: non-finite weight");
  for (double v : b_)
    require(std::isfinite(v), ErrorKind::kDataValidity, "conv: non-finite bias");
}

namespace {

void check_input(const Conv1d& layer, const Tensor& x) {
  if (x.channels == layer.in_channels() && x.length > 0 &&
      x.data.size() == x.channels * x.length)
    return;
  fail(ErrorKind::kParameter, "conv: input has " + std::to_string(x.channels) +
                                  " channels, layer expects " +
                                  std::to_string(layer.in_channels()));
}

}  // namespace

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRowMap = Eigen::Map<const RowMat>;
using RowMap = Eigen::Map<RowMat>;

// Columns of x unrolled so that row (i * k + j), column t holds
// x[i][t + j - pad] (zero outside the signal).
RowMat im2col(const Tensor& x, std::size_t k) {
  const std::size_t pad = k / 2;
  const std::size_t len = x.length;
  RowMat cols = RowMat::Zero(static_cast<Eigen::Index>(x.channels * k),
                             static_cast<Eigen::Index>(len));
  for (std::size_t i = 0; i < x.channels; ++i) {
    const double* src = x.data.data() + i * len;
    for (std::size_t j = 0; j < k; ++j) {
      double* dst = cols.data() + (i * k + j) * len;
      // t + j - pad in [0, len)
      const std::size_t lo = j < pad ? pad - j : 0;
      const std::size_t hi = std::min(len, len + pad - j);
      for (std::size_t t = lo; t < hi; ++t) dst[t] = src[t + j - pad];
    }
  }
  return cols;
}

ConstRowMap weight_matrix(const Conv1d& layer) {
  return ConstRowMap(layer.weight().data(),
                     static_cast<Eigen::Index>(layer.out_channels()),
                     static_cast<Eigen::Index>(layer.in_channels() *
                                               layer.kernel_len()));
}

ConstRowMap as_matrix(const Tensor& t) {
  return ConstRowMap(t.data.data(), static_cast<Eigen::Index>(t.channels),
                     static_cast<Eigen::Index>(t.length));
}

}  // namespace

Tensor conv_linear(const Conv1d& layer, const Tensor& x) {
  check_input(layer, x);
  const RowMat cols = im2col(x, layer.kernel_len());
  Tensor y(layer.out_channels(), x.length);
  RowMap(y.data.data(), static_cast<Eigen::Index>(y.channels),
         static_cast<Eigen::Index>(y.length))
      .noalias() = weight_matrix(layer) * cols;
  return y;
}

Tensor conv_transpose(const Conv1d& layer, const Tensor& g) {
  require(g.channels == layer.out_channels(), ErrorKind::kParameter,
          "conv: gradient channel mismatch");
  const std::size_t k = layer.kernel_len();
  const std::size_t pad = k / 2;
  const std::size_t len = g.length;
  const RowMat cols = weight_matrix(layer).transpose() * as_matrix(g);
  // Scatter the unrolled columns back: gx[i][t + j - pad] += cols[i*k+j][t].
  Tensor gx(layer.in_channels(), len);
  for (std::size_t i = 0; i < layer.in_channels(); ++i) {
    double* dst = gx.data.data() + i * len;
    for (std::size_t j = 0; j < k; ++j) {
      const double* src = cols.data() + (i * k + j) * len;
      const std::size_t lo = j < pad ? pad - j : 0;
      const std::size_t hi = std::min(len, len + pad - j);
      for (std::size_t t = lo; t < hi; ++t) dst[t + j - pad] += src[t];
    }
  }
  return gx;
}

void conv_weight_grad_accumulate(const Conv1d& layer, const Tensor& x,
                                 const Tensor& g, std::span<double> grad) {
  check_input(layer, x);
  require(g.channels == layer.out_channels() && g.length == x.length,
          ErrorKind::kParameter, "conv: gradient shape mismatch");
  require(grad.size() == layer.weight().size(), ErrorKind::kParameter,
          "conv: gradient buffer size mismatch");
  const RowMat cols = im2col(x, layer.kernel_len());
  RowMap(grad.data(), static_cast<Eigen::Index>(layer.out_channels()),
         static_cast<Eigen::Index>(layer.in_channels() * layer.kernel_len()))
      .noalias() += as_matrix(g) * cols.transpose();
}

Tensor conv_forward(const Conv1d& layer, const Tensor& x, ConvCache* cache) {
  Tensor pre = conv_linear(layer, x);
  const auto& b = layer.bias();
  for (std::size_t o = 0; o < pre.channels; ++o)
    for (double& v : pre.row(o)) v += b[o];
  Tensor y = pre;
  if (layer.activation() != Activation::kLinear)
    for (double& v : y.data) v = activate(layer.activation(), v);
  if (cache) {
    cache->input = x;
    cache->pre = std::move(pre);
    cache->valid = true;
  }
  return y;
}

Tensor conv_backward(Conv1d& layer, const ConvCache& cache,
                     const Tensor& grad_out, bool accumulate_params) {
  require_usage(cache.valid, "conv backward called without a recorded forward");
  require(grad_out.same_shape(cache.pre), ErrorKind::kParameter,
          "conv: upstream gradient shape mismatch");
  Tensor gp = grad_out;
  if (layer.activation() != Activation::kLinear) {
    for (std::size_t i = 0; i < gp.data.size(); ++i)
      gp.data[i] *= activation_slope(layer.activation(), cache.pre.data[i]);
  }
  if (accumulate_params) {
    auto& gb = layer.bias_grad();
    for (std::size_t o = 0; o < gp.channels; ++o) {
      double acc = 0.0;
      for (double v : gp.row(o)) acc += v;
      gb[o] += acc;
    }
    conv_weight_grad_accumulate(layer, cache.input, gp, layer.weight_grad());
  }
  return conv_transpose(layer, gp);
}

// ---------------------------------------------------------------------------

Tensor maxpool2_forward(const Tensor& x, PoolCache* cache) {
  const std::size_t out_len = x.length / 2;
  require(out_len > 0, ErrorKind::kParameter, "maxpool: input too short");
  Tensor y(x.channels, out_len);
  if (cache) {
    cache->argmax.assign(x.channels * out_len, 0);
    cache->in_channels = x.channels;
    cache->in_length = x.length;
    cache->valid = true;
  }
  for (std::size_t c = 0; c < x.channels; ++c) {
    for (std::size_t t = 0; t < out_len; ++t) {
      const std::size_t a = 2 * t;
      const std::size_t pick = x.at(c, a + 1) > x.at(c, a) ? a + 1 : a;
      y.at(c, t) = x.at(c, pick);
      if (cache)
        cache->argmax[c * out_len + t] =
            static_cast<std::uint32_t>(c * x.length + pick);
    }
  }
  return y;
}

Tensor maxpool2_backward(const PoolCache& cache, const Tensor& grad_out) {
  require_usage(cache.valid,
                "maxpool backward called without a recorded forward");
  require(grad_out.data.size() == cache.argmax.size(), ErrorKind::kParameter,
          "maxpool: upstream gradient shape mismatch");
  Tensor gx(cache.in_channels, cache.in_length);
  for (std::size_t k = 0; k < cache.argmax.size(); ++k)
    gx.data[cache.argmax[k]] += grad_out.data[k];
  return gx;
}

Tensor maxpool2_gather(const PoolCache& cache, const Tensor& g) {
  require_usage(cache.valid, "maxpool gather called without a recorded forward");
  require(g.channels == cache.in_channels && g.length == cache.in_length,
          ErrorKind::kParameter, "maxpool: gather shape mismatch");
  Tensor out(cache.in_channels, cache.in_length / 2);
  for (std::size_t k = 0; k < cache.argmax.size(); ++k)
    out.data[k] = g.data[cache.argmax[k]];
  return out;
}

// ---------------------------------------------------------------------------

Affine::Affine(std::size_t in, std::size_t out)
    : in_(in),
      out_(out),
      w_(in * out, 0.0),
      b_(out, 0.0),
      gw_(in * out, 0.0),
      gb_(out, 0.0) {}

void Affine::init_glorot(Rng& rng) {
  fill_uniform(w_, std::sqrt(6.0 / static_cast<double>(in_ + out_)), rng);
  std::fill(b_.begin(), b_.end(), 0.0);
}

void Affine::zero_grad() {
  std::fill(gw_.begin(), gw_.end(), 0.0);
  std::fill(gb_.begin(), gb_.end(), 0.0);
}

void Affine::append_blocks(std::vector<ParamBlock>& out) {
  out.push_back({w_, gw_});
  out.push_back({b_, gb_});
}

std::vector<double> Affine::forward(std::span<const double> x) const {
  require(x.size() == in_, ErrorKind::kParameter, "affine: input size mismatch");
  std::vector<double> y(b_);
  for (std::size_t o = 0; o < out_; ++o) {
    const double* wo = w_.data() + o * in_;
    double acc = 0.0;
#pragma omp simd reduction(+ : acc)
    for (std::size_t i = 0; i < in_; ++i) acc += wo[i] * x[i];
    y[o] += acc;
  }
  return y;
}

std::vector<double> Affine::backward(std::span<const double> x,
                                     std::span<const double> grad_out,
                                     bool accumulate_params) {
  require(x.size() == in_ && grad_out.size() == out_, ErrorKind::kParameter,
          "affine: backward shape mismatch");
  std::vector<double> gx(in_, 0.0);
  for (std::size_t o = 0; o < out_; ++o) {
    const double g = grad_out[o];
    const double* wo = w_.data() + o * in_;
    for (std::size_t i = 0; i < in_; ++i) gx[i] += wo[i] * g;
    if (accumulate_params) {
      double* gwo = gw_.data() + o * in_;
      for (std::size_t i = 0; i < in_; ++i) gwo[i] += g * x[i];
      gb_[o] += g;
    }
  }
  return gx;
}

// ---------------------------------------------------------------------------

Lstm::Lstm(std::size_t input_size, std::size_t hidden_size)
    : in_(input_size),
      h_(hidden_size),
      wx_(4 * hidden_size * input_size, 0.0),
      wh_(4 * hidden_size * hidden_size, 0.0),
      b_(4 * hidden_size, 0.0),
      gwx_(wx_.size(), 0.0),
      gwh_(wh_.size(), 0.0),
      gb_(b_.size(), 0.0) {}

void Lstm::init_glorot(Rng& rng) {
  fill_uniform(wx_, std::sqrt(6.0 / static_cast<double>(in_ + 4 * h_)), rng);
  fill_uniform(wh_, std::sqrt(6.0 / static_cast<double>(h_ + 4 * h_)), rng);
  std::fill(b_.begin(), b_.end(), 0.0);
  // Forget-gate bias starts at 1.
  std::fill(b_.begin() + static_cast<std::ptrdiff_t>(h_),
            b_.begin() + static_cast<std::ptrdiff_t>(2 * h_), 1.0);
}

void Lstm::zero_grad() {
  std::fill(gwx_.begin(), gwx_.end(), 0.0);
  std::fill(gwh_.begin(), gwh_.end(), 0.0);
  std::fill(gb_.begin(), gb_.end(), 0.0);
}

void Lstm::append_blocks(std::vector<ParamBlock>& out) {
  out.push_back({wx_, gwx_});
  out.push_back({wh_, gwh_});
  out.push_back({b_, gb_});
}

std::vector<double> Lstm::forward(const Tensor& seq, Cache* cache) const {
  require(seq.channels == in_ && seq.length > 0, ErrorKind::kParameter,
          "lstm: input feature size mismatch");
  const std::size_t steps = seq.length;
  const std::size_t g4 = 4 * h_;
  std::vector<double> h(h_, 0.0), c(h_, 0.0), z(g4), x(in_);
  if (cache) {
    cache->x.assign(steps, {});
    cache->gates.assign(steps, {});
    cache->c.assign(steps, {});
    cache->h.assign(steps, {});
  }
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t f = 0; f < in_; ++f) x[f] = seq.at(f, t);
    for (std::size_t r = 0; r < g4; ++r) {
      double acc = b_[r];
      const double* wxr = wx_.data() + r * in_;
      const double* whr = wh_.data() + r * h_;
      for (std::size_t f = 0; f < in_; ++f) acc += wxr[f] * x[f];
      for (std::size_t f = 0; f < h_; ++f) acc += whr[f] * h[f];
      z[r] = acc;
    }
    for (std::size_t u = 0; u < h_; ++u) {
      z[u] = sigmoid(z[u]);
      z[h_ + u] = sigmoid(z[h_ + u]);
      z[2 * h_ + u] = std::tanh(z[2 * h_ + u]);
      z[3 * h_ + u] = sigmoid(z[3 * h_ + u]);
      c[u] = z[h_ + u] * c[u] + z[u] * z[2 * h_ + u];
      h[u] = z[3 * h_ + u] * std::tanh(c[u]);
    }
    if (cache) {
      cache->x[t] = x;
      cache->gates[t] = z;
      cache->c[t] = c;
      cache->h[t] = h;
    }
  }
  if (cache) cache->valid = true;
  return h;
}

Tensor Lstm::backward(const Cache& cache, std::span<const double> grad_h,
                      bool accumulate_params) {
  require_usage(cache.valid, "lstm backward called without a recorded forward");
  require(grad_h.size() == h_, ErrorKind::kParameter,
          "lstm: upstream gradient size mismatch");
  const std::size_t steps = cache.x.size();
  const std::size_t g4 = 4 * h_;
  Tensor gseq(in_, steps);
  std::vector<double> dh(grad_h.begin(), grad_h.end());
  std::vector<double> dc(h_, 0.0), dz(g4), dh_prev(h_);
  const std::vector<double> zeros(h_, 0.0);
  for (std::size_t step = steps; step-- > 0;) {
    const auto& gate = cache.gates[step];
    const auto& c = cache.c[step];
    const auto& c_prev = step > 0 ? cache.c[step - 1] : zeros;
    const auto& h_prev = step > 0 ? cache.h[step - 1] : zeros;
    for (std::size_t u = 0; u < h_; ++u) {
      const double i = gate[u], f = gate[h_ + u], g = gate[2 * h_ + u],
                   o = gate[3 * h_ + u];
      const double tc = std::tanh(c[u]);
      const double d_o = dh[u] * tc;
      dc[u] += dh[u] * o * (1.0 - tc * tc);
      dz[u] = dc[u] * g * i * (1.0 - i);
      dz[h_ + u] = dc[u] * c_prev[u] * f * (1.0 - f);
      dz[2 * h_ + u] = dc[u] * i * (1.0 - g * g);
      dz[3 * h_ + u] = d_o * o * (1.0 - o);
      dc[u] *= f;
    }
    std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
    const auto& x = cache.x[step];
    for (std::size_t r = 0; r < g4; ++r) {
      const double d = dz[r];
      const double* wxr = wx_.data() + r * in_;
      const double* whr = wh_.data() + r * h_;
      for (std::size_t f = 0; f < in_; ++f) gseq.at(f, step) += wxr[f] * d;
      for (std::size_t f = 0; f < h_; ++f) dh_prev[f] += whr[f] * d;
      if (accumulate_params) {
        double* gx = gwx_.data() + r * in_;
        double* gh = gwh_.data() + r * h_;
        for (std::size_t f = 0; f < in_; ++f) gx[f] += d * x[f];
        for (std::size_t f = 0; f < h_; ++f) gh[f] += d * h_prev[f];
        gb_[r] += d;
      }
    }
    dh = dh_prev;
  }
  return gseq;
}

// ---------------------------------------------------------------------------

Adam::Adam(std::vector<ParamBlock> blocks, AdamSpec spec)
    : blocks_(std::move(blocks)), spec_(spec) {
  require(spec.learning_rate > 0.0 && spec.beta1 >= 0.0 && spec.beta1 < 1.0 &&
              spec.beta2 >= 0.0 && spec.beta2 < 1.0,
          ErrorKind::kParameter, "adam: invalid hyperparameters");
  for (const auto& b : blocks_) {
    m_.emplace_back(b.value.size(), 0.0);
    v_.emplace_back(b.value.size(), 0.0);
  }
}

void Adam::zero_grad() {
  for (auto& b : blocks_) std::fill(b.grad.begin(), b.grad.end(), 0.0);
}

void Adam::step() {
  ++t_;
  const double c1 = 1.0 - std::pow(spec_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(spec_.beta2, static_cast<double>(t_));
  const double lr = spec_.learning_rate;
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    auto& blk = blocks_[k];
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < blk.value.size(); ++i) {
      const double g = blk.grad[i];
      m[i] = spec_.beta1 * m[i] + (1.0 - spec_.beta1) * g;
      v[i] = spec_.beta2 * v[i] + (1.0 - spec_.beta2) * g * g;
      blk.value[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + spec_.epsilon);
    }
  }
}

}  // namespace ppgspoof::nn
