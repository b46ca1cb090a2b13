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

// Small dense 1-D network kernels: same-padded convolution, max pooling,
// affine maps and an LSTM cell, each with an exact reverse-mode backward.

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace ppgspoof::nn {

using Rng = std::mt19937_64;

enum class Activation : std::uint8_t { kLeakyRelu = 0, kLinear = 1 };
inline constexpr double kLeakySlope = 0.2;

inline double activate(Activation a, double x) {
  return (a == Activation::kLeakyRelu && x <= 0.0) ? kLeakySlope * x : x;
}
inline double activation_slope(Activation a, double x) {
  return (a == Activation::kLeakyRelu && x <= 0.0) ? kLeakySlope : 1.0;
}

/// Row-major [channels x length] buffer.
struct Tensor {
  std::size_t channels = 0;
  std::size_t length = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::size_t c, std::size_t l, double fill = 0.0)
      : channels(c), length(l), data(c * l, fill) {}

  double& at(std::size_t c, std::size_t t) { return data[c * length + t]; }
  double at(std::size_t c, std::size_t t) const { return data[c * length + t]; }
  std::span<double> row(std::size_t c) {
    return {data.data() + c * length, length};
  }
  std::span<const double> row(std::size_t c) const {
    return {data.data() + c * length, length};
  }
  bool same_shape(const Tensor& o) const {
    return channels == o.channels && length == o.length;
  }
};

Tensor from_samples(std::span<const double> samples);

/// A trainable parameter array together with its gradient accumulator.
struct ParamBlock {
  std::span<double> value;
  std::span<double> grad;
};

// ---------------------------------------------------------------------------
// Convolution

class Conv1d {
 public:
  Conv1d() = default;
  Conv1d(std::size_t in_channels, std::size_t out_channels,
         std::size_t kernel_len, Activation act);

  std::size_t in_channels() const noexcept { return in_; }
  std::size_t out_channels() const noexcept { return out_; }
  std::size_t kernel_len() const noexcept { return k_; }
  Activation activation() const noexcept { return act_; }

  // weight index: (o * in + i) * k + j
  std::vector<double>& weight() noexcept { return w_; }
  const std::vector<double>& weight() const noexcept { return w_; }
  std::vector<double>& bias() noexcept { return b_; }
  const std::vector<double>& bias() const noexcept { return b_; }
  std::vector<double>& weight_grad() noexcept { return gw_; }
  std::vector<double>& bias_grad() noexcept { return gb_; }

  void init_glorot(Rng& rng);
  void zero_grad();
  std::size_t param_count() const noexcept { return w_.size() + b_.size(); }
  void append_blocks(std::vector<ParamBlock>& out);
  void validate() const;

 private:
  std::size_t in_ = 0, out_ = 0, k_ = 0;
  Activation act_ = Activation::kLinear;
  std::vector<double> w_, b_, gw_, gb_;
};

struct ConvCache {
  Tensor input;
  Tensor pre;  // pre-activation output
  bool valid = false;
};

// Cross-correlation of x with the layer kernels, no bias or activation.
Tensor conv_linear(const Conv1d& layer, const Tensor& x);
// Adjoint of conv_linear: maps an output-shaped tensor to input shape.
Tensor conv_transpose(const Conv1d& layer, const Tensor& g);
// grad[o][i][j] += sum_t g[o][t] * x[i][t + j - pad]
void conv_weight_grad_accumulate(const Conv1d& layer, const Tensor& x,
                                 const Tensor& g, std::span<double> grad);

Tensor conv_forward(const Conv1d& layer, const Tensor& x,
                    ConvCache* cache = nullptr);
// Accumulates parameter gradients into the layer's grad buffers when
// accumulate_params is set; returns the input gradient.
Tensor conv_backward(Conv1d& layer, const ConvCache& cache,
                     const Tensor& grad_out, bool accumulate_params = true);

// ---------------------------------------------------------------------------
// Max pooling, width 2, stride 2. Ties route to the first index.

struct PoolCache {
  std::vector<std::uint32_t> argmax;  // absolute input offset per output
  std::size_t in_channels = 0;
  std::size_t in_length = 0;
  bool valid = false;
};

Tensor maxpool2_forward(const Tensor& x, PoolCache* cache = nullptr);
Tensor maxpool2_backward(const PoolCache& cache, const Tensor& grad_out);
// Reads the routed positions back out: out[c][t] = g[argmax(c, t)].
Tensor maxpool2_gather(const PoolCache& cache, const Tensor& g);

// ---------------------------------------------------------------------------
// Affine map y = W x + b on flat vectors.

class Affine {
 public:
  Affine() = default;
  Affine(std::size_t in, std::size_t out);

  std::size_t in_size() const noexcept { return in_; }
  std::size_t out_size() const noexcept { return out_; }
  std::vector<double>& weight() noexcept { return w_; }  // [out][in]
  const std::vector<double>& weight() const noexcept { return w_; }
  std::vector<double>& bias() noexcept { return b_; }
  const std::vector<double>& bias() const noexcept { return b_; }
  std::vector<double>& weight_grad() noexcept { return gw_; }
  std::vector<double>& bias_grad() noexcept { return gb_; }

  void init_glorot(Rng& rng);
  void zero_grad();
  std::size_t param_count() const noexcept { return w_.size() + b_.size(); }
  void append_blocks(std::vector<ParamBlock>& out);

  std::vector<double> forward(std::span<const double> x) const;
  // Returns dL/dx; accumulates parameter gradients when requested.
  std::vector<double> backward(std::span<const double> x,
                               std::span<const double> grad_out,
                               bool accumulate_params = true);

 private:
  std::size_t in_ = 0, out_ = 0;
  std::vector<double> w_, b_, gw_, gb_;
};

// ---------------------------------------------------------------------------
// Single-layer LSTM over a [features x steps] sequence, returning the final
// hidden state. Gate order in the stacked weights: input, forget, cell, output.

class Lstm {
 public:
  Lstm() = default;
  Lstm(std::size_t input_size, std::size_t hidden_size);

  std::size_t input_size() const noexcept { return in_; }
  std::size_t hidden_size() const noexcept { return h_; }
  std::vector<double>& input_weight() noexcept { return wx_; }   // [4H][in]
  std::vector<double>& hidden_weight() noexcept { return wh_; }  // [4H][H]
  std::vector<double>& bias() noexcept { return b_; }            // [4H]
  const std::vector<double>& input_weight() const noexcept { return wx_; }
  const std::vector<double>& hidden_weight() const noexcept { return wh_; }
  const std::vector<double>& bias() const noexcept { return b_; }

  void init_glorot(Rng& rng);
  void zero_grad();
  std::size_t param_count() const noexcept {
    return wx_.size() + wh_.size() + b_.size();
  }
  void append_blocks(std::vector<ParamBlock>& out);

  struct Cache {
    std::vector<std::vector<double>> x;      // per step input
    std::vector<std::vector<double>> gates;  // activated i, f, g, o
    std::vector<std::vector<double>> c;      // cell state after each step
    std::vector<std::vector<double>> h;      // hidden state after each step
    bool valid = false;
  };

  std::vector<double> forward(const Tensor& seq, Cache* cache = nullptr) const;
  // grad_h is dL/dh_T. Returns dL/dseq.
  Tensor backward(const Cache& cache, std::span<const double> grad_h,
                  bool accumulate_params = true);

 private:
  std::size_t in_ = 0, h_ = 0;
  std::vector<double> wx_, wh_, b_, gwx_, gwh_, gb_;
};

// ---------------------------------------------------------------------------
// Adam over a fixed list of parameter blocks.

struct AdamSpec {
  double learning_rate = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.9;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam(std::vector<ParamBlock> blocks, AdamSpec spec);
  void step();
  void zero_grad();
  long steps_taken() const noexcept { return t_; }

 private:
  std::vector<ParamBlock> blocks_;
  std::vector<std::vector<double>> m_, v_;
  AdamSpec spec_;
  long t_ = 0;
};

double sigmoid(double x);

}  // namespace ppgspoof::nn
