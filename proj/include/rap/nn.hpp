// Copyright 2026 The RAP Authors
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

#ifndef RAP_NN_HPP_
#define RAP_NN_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rap/tensor.hpp"

namespace rap {

enum class LayerKind { kDense, kConv2d, kRelu, kSoftmax };

std::string layer_kind_name(LayerKind kind);
LayerKind layer_kind_from_name(const std::string& name);

// One layer. Dense weights are (n_in, n_out) row-major; conv2d weights are
// (kh, kw, c_in, c_out) row-major with valid padding and stride 1.
struct LayerSpec {
  LayerKind kind = LayerKind::kRelu;
  std::size_t n_in = 0, n_out = 0;          // dense
  std::size_t kh = 0, kw = 0, c_in = 0, c_out = 0;  // conv2d
  Tensor weights;
  Tensor bias;
  std::string name;

  bool trainable() const {
    return kind == LayerKind::kDense || kind == LayerKind::kConv2d;
  }
  std::size_t weight_count() const { return weights.size(); }
  // Kernel-matrix dimensions under the im2col view: dense layers are
  // themselves, conv layers are (kh*kw*c_in) x c_out.
  std::size_t matrix_in() const;
  std::size_t matrix_out() const;

  static LayerSpec dense(std::size_t n_in, std::size_t n_out);
  static LayerSpec conv2d(std::size_t kh, std::size_t kw, std::size_t c_in,
                          std::size_t c_out);
  static LayerSpec relu();
  static LayerSpec softmax();
};

struct Network {
  std::vector<LayerSpec> layers;
  std::uint64_t rng_seed = 0;

  std::size_t parameter_count() const;
  void validate() const;
  // Stable per-kind names: dense_0, dense_1, conv2d_0, ...
  void assign_names();
};

// Seeded He-style initialization of all trainable layers.
void init_weights(Network& net, std::uint64_t seed);

struct FixedPointFormat {
  int total_bits = 16;   // P, includes the sign bit
  int integer_bits = 6;  // I, includes the sign bit

  void validate() const;
  double step() const;
  double max_value() const;
  double min_value() const;
};

double quantize_value(double x, const FixedPointFormat& fmt);
Network quantize_network(const Network& net, const FixedPointFormat& fmt);

// Pruning mask: one bit vector per layer, aligned with the row-major weight
// data (empty for non-trainable layers). 1 = weight alive.
struct Mask {
  std::vector<std::vector<std::uint8_t>> layers;

  static Mask all_alive(const Network& net);
  bool empty() const { return layers.empty(); }
  std::size_t masked_count() const;
  void apply(Network& net) const;  // zero the masked weights
};

struct LayerGrads {
  Tensor weights;
  Tensor bias;
};

// A weight group expressed as row-major indices into one layer's weight
// tensor; the view used by regularization and fine-tuning.
struct GroupRef {
  std::size_t layer = 0;
  std::vector<std::size_t> coords;
};

struct Dataset {
  Tensor features;  // (N, F) or (N, H, W, C)
  std::vector<int> labels;
  int class_count = 0;

  std::size_t size() const { return labels.size(); }
};

Tensor forward(const Network& net, const Tensor& batch);

// Mean cross-entropy (softmax applied to the final pre-softmax output) plus
// the group regularization term. Gradients of masked weights are zeroed.
std::pair<double, std::vector<LayerGrads>> loss_and_grads(
    const Network& net, const Tensor& batch, const std::vector<int>& labels,
    double lambda, const std::vector<GroupRef>& groups,
    const Mask* mask = nullptr);

// term = lambda * sum_g ||w_g||_2; if grads != nullptr, adds
// lambda * w / ||w_g||_2 per coordinate (zero for all-zero groups).
double group_regularization(const Network& net,
                            const std::vector<GroupRef>& groups,
                            double lambda,
                            std::vector<LayerGrads>* grads = nullptr);

struct AdamState {
  std::int64_t step = 0;
  double beta1 = 0.9, beta2 = 0.999, epsilon = 1e-7, lr = 1e-3;
  std::vector<LayerGrads> m, v;

  static AdamState init(const Network& net, double lr = 1e-3);
};

void adam_step(Network& net, const std::vector<LayerGrads>& grads,
               AdamState& state, const Mask* mask = nullptr);

struct TrainConfig {
  int epochs = 30;
  std::size_t batch_size = 32;
  double lr = 1e-3;
  double lambda = 1e-4;
  std::uint64_t seed = 0;
};

// Seeded minibatch training loop; returns the final epoch's mean loss.
double fit(Network& net, const Dataset& train, const TrainConfig& cfg,
           const std::vector<GroupRef>& groups = {},
           const Mask* mask = nullptr);

double evaluate(const Network& net, const Dataset& data,
                const std::optional<FixedPointFormat>& fmt = std::nullopt);

}  // namespace rap

#endif  // RAP_NN_HPP_
