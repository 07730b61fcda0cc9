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

#include "rap/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rap/errors.hpp"
#include "rap/kernels.hpp"

namespace rap {

namespace {

// Rows of a batch tensor: first dimension is the sample index, everything
// else is flattened into features.
std::size_t batch_rows(const Tensor& t) {
  if (t.shape.empty()) throw ShapeError("batch tensor has no shape");
  return t.shape[0];
}

std::size_t batch_cols(const Tensor& t) {
  return t.shape.empty() || t.shape[0] == 0 ? 0 : t.size() / t.shape[0];
}

void softmax_rows(const double* in, double* out, std::size_t rows,
                  std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* x = in + r * cols;
    double* y = out + r * cols;
    double mx = x[0];
    for (std::size_t j = 1; j < cols; ++j) mx = std::max(mx, x[j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      y[j] = std::exp(x[j] - mx);
      sum += y[j];
    }
    for (std::size_t j = 0; j < cols; ++j) y[j] /= sum;
  }
}

Tensor apply_layer(const LayerSpec& layer, const Tensor& input) {
  const std::size_t n = batch_rows(input);
  switch (layer.kind) {
    case LayerKind::kDense: {
      if (batch_cols(input) != layer.n_in)
        throw ShapeError("dense layer " + layer.name + ": expected " +
                         std::to_string(layer.n_in) + " inputs, got " +
                         std::to_string(batch_cols(input)));
      Tensor out = Tensor::zeros({n, layer.n_out});
      kernels::matmul(input.data.data(), layer.weights.data.data(),
                      out.data.data(), n, layer.n_in, layer.n_out);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < layer.n_out; ++j)
          out.data[r * layer.n_out + j] += layer.bias.data[j];
      return out;
    }
    case LayerKind::kConv2d: {
      if (input.shape.size() != 4 || input.shape[3] != layer.c_in)
        throw ShapeError("conv2d layer " + layer.name +
                         ": expected (N, H, W, " + std::to_string(layer.c_in) +
                         ") input");
      const std::size_t h = input.shape[1], w = input.shape[2];
      if (h < layer.kh || w < layer.kw)
        throw ShapeError("conv2d layer " + layer.name + ": input too small");
      const std::size_t oh = h - layer.kh + 1, ow = w - layer.kw + 1;
      const std::size_t patch = layer.kh * layer.kw * layer.c_in;
      Tensor out = Tensor::zeros({n, oh, ow, layer.c_out});
      std::vector<double> col(oh * ow * patch);
      for (std::size_t s = 0; s < n; ++s) {
        kernels::im2col(input.data.data() + s * h * w * layer.c_in, h, w,
                        layer.c_in, layer.kh, layer.kw, col.data());
        double* oy = out.data.data() + s * oh * ow * layer.c_out;
        kernels::matmul(col.data(), layer.weights.data.data(), oy, oh * ow,
                        patch, layer.c_out);
        for (std::size_t r = 0; r < oh * ow; ++r)
          for (std::size_t j = 0; j < layer.c_out; ++j)
            oy[r * layer.c_out + j] += layer.bias.data[j];
      }
      return out;
    }
    case LayerKind::kRelu: {
      Tensor out = input;
      for (double& x : out.data) x = std::max(x, 0.0);
      return out;
    }
    case LayerKind::kSoftmax: {
      const std::size_t cols = batch_cols(input);
      Tensor out = input;
      softmax_rows(input.data.data(), out.data.data(), n, cols);
      return out;
    }
  }
  throw ShapeError("unknown layer kind");
}

std::vector<Tensor> forward_all(const Network& net, const Tensor& batch) {
  std::vector<Tensor> acts;
  acts.reserve(net.layers.size() + 1);
  acts.push_back(batch);
  for (const LayerSpec& layer : net.layers)
    acts.push_back(apply_layer(layer, acts.back()));
  return acts;
}

// delta is d(loss)/d(output); returns d(loss)/d(input) and fills grads.
Tensor backprop_layer(const LayerSpec& layer, const Tensor& input,
                      const Tensor& output, const Tensor& delta,
                      LayerGrads& grads) {
  const std::size_t n = batch_rows(input);
  switch (layer.kind) {
    case LayerKind::kDense: {
      std::vector<double> xt =
          kernels::transpose(input.data.data(), n, layer.n_in);
      grads.weights = Tensor::zeros({layer.n_in, layer.n_out});
      kernels::matmul(xt.data(), delta.data.data(),
                      grads.weights.data.data(), layer.n_in, n, layer.n_out);
      grads.bias = Tensor::zeros({layer.n_out});
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < layer.n_out; ++j)
          grads.bias.data[j] += delta.data[r * layer.n_out + j];
      std::vector<double> wt = kernels::transpose(layer.weights.data.data(),
                                                  layer.n_in, layer.n_out);
      Tensor dx = Tensor::zeros(input.shape);
      kernels::matmul(delta.data.data(), wt.data(), dx.data.data(), n,
                      layer.n_out, layer.n_in);
      return dx;
    }
    case LayerKind::kConv2d: {
      const std::size_t h = input.shape[1], w = input.shape[2];
      const std::size_t oh = h - layer.kh + 1, ow = w - layer.kw + 1;
      const std::size_t patch = layer.kh * layer.kw * layer.c_in;
      grads.weights = Tensor::zeros({layer.kh, layer.kw, layer.c_in,
                                     layer.c_out});
      grads.bias = Tensor::zeros({layer.c_out});
      Tensor dx = Tensor::zeros(input.shape);
      std::vector<double> col(oh * ow * patch);
      std::vector<double> dw(patch * layer.c_out);
      std::vector<double> dcol(oh * ow * patch);
      std::vector<double> wt = kernels::transpose(layer.weights.data.data(),
                                                  patch, layer.c_out);
      for (std::size_t s = 0; s < n; ++s) {
        const double* dy = delta.data.data() + s * oh * ow * layer.c_out;
        kernels::im2col(input.data.data() + s * h * w * layer.c_in, h, w,
                        layer.c_in, layer.kh, layer.kw, col.data());
        std::vector<double> colt =
            kernels::transpose(col.data(), oh * ow, patch);
        kernels::matmul(colt.data(), dy, dw.data(), patch, oh * ow,
                        layer.c_out);
        for (std::size_t i = 0; i < dw.size(); ++i)
          grads.weights.data[i] += dw[i];
        for (std::size_t r = 0; r < oh * ow; ++r)
          for (std::size_t j = 0; j < layer.c_out; ++j)
            grads.bias.data[j] += dy[r * layer.c_out + j];
        kernels::matmul(dy, wt.data(), dcol.data(), oh * ow, layer.c_out,
                        patch);
        kernels::col2im(dcol.data(), h, w, layer.c_in, layer.kh, layer.kw,
                        dx.data.data() + s * h * w * layer.c_in);
      }
      return dx;
    }
    case LayerKind::kRelu: {
      Tensor dx = delta;
      for (std::size_t i = 0; i < dx.size(); ++i)
        if (input.data[i] <= 0.0) dx.data[i] = 0.0;
      return dx;
    }
    case LayerKind::kSoftmax: {
      const std::size_t cols = batch_cols(input);
      Tensor dx = Tensor::zeros(input.shape);
      for (std::size_t r = 0; r < n; ++r) {
        const double* y = output.data.data() + r * cols;
        const double* d = delta.data.data() + r * cols;
        double dot = 0.0;
        for (std::size_t j = 0; j < cols; ++j) dot += d[j] * y[j];
        for (std::size_t j = 0; j < cols; ++j)
          dx.data[r * cols + j] = y[j] * (d[j] - dot);
      }
      return dx;
    }
  }
  throw ShapeError("unknown layer kind");
}

}  // namespace

std::string layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::kDense: return "dense";
    case LayerKind::kConv2d: return "conv2d";
    case LayerKind::kRelu: return "relu";
    case LayerKind::kSoftmax: return "softmax";
  }
  return "unknown";
}

LayerKind layer_kind_from_name(const std::string& name) {
  if (name == "dense") return LayerKind::kDense;
  if (name == "conv2d") return LayerKind::kConv2d;
  if (name == "relu") return LayerKind::kRelu;
  if (name == "softmax") return LayerKind::kSoftmax;
  throw FormatError("unknown layer kind: " + name);
}

std::size_t LayerSpec::matrix_in() const {
  return kind == LayerKind::kConv2d ? kh * kw * c_in : n_in;
}

std::size_t LayerSpec::matrix_out() const {
  return kind == LayerKind::kConv2d ? c_out : n_out;
}

LayerSpec LayerSpec::dense(std::size_t n_in, std::size_t n_out) {
  LayerSpec l;
  l.kind = LayerKind::kDense;
  l.n_in = n_in;
  l.n_out = n_out;
  l.weights = Tensor::zeros({n_in, n_out});
  l.bias = Tensor::zeros({n_out});
  return l;
}

LayerSpec LayerSpec::conv2d(std::size_t kh, std::size_t kw, std::size_t c_in,
                            std::size_t c_out) {
  LayerSpec l;
  l.kind = LayerKind::kConv2d;
  l.kh = kh;
  l.kw = kw;
  l.c_in = c_in;
  l.c_out = c_out;
  l.weights = Tensor::zeros({kh, kw, c_in, c_out});
  l.bias = Tensor::zeros({c_out});
  return l;
}

LayerSpec LayerSpec::relu() {
  LayerSpec l;
  l.kind = LayerKind::kRelu;
  return l;
}

LayerSpec LayerSpec::softmax() {
  LayerSpec l;
  l.kind = LayerKind::kSoftmax;
  return l;
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const LayerSpec& l : layers)
    if (l.trainable()) n += l.weights.size() + l.bias.size();
  return n;
}

void Network::validate() const {
  bool any_trainable = false;
  for (const LayerSpec& l : layers) {
    if (l.kind == LayerKind::kDense) {
      if (l.weights.shape != std::vector<std::size_t>{l.n_in, l.n_out})
        throw ShapeError("dense layer weight shape mismatch");
      if (l.bias.size() != l.n_out)
        throw ShapeError("dense layer bias length mismatch");
      any_trainable = true;
    } else if (l.kind == LayerKind::kConv2d) {
      if (l.weights.shape !=
          std::vector<std::size_t>{l.kh, l.kw, l.c_in, l.c_out})
        throw ShapeError("conv2d layer weight shape mismatch");
      if (l.bias.size() != l.c_out)
        throw ShapeError("conv2d layer bias length mismatch");
      any_trainable = true;
    }
  }
  if (!any_trainable) throw ShapeError("network has no trainable layer");
}

void Network::assign_names() {
  std::size_t dense = 0, conv = 0, relu = 0, softmax = 0;
  for (LayerSpec& l : layers) {
    switch (l.kind) {
      case LayerKind::kDense: l.name = "dense_" + std::to_string(dense++); break;
      case LayerKind::kConv2d:
        l.name = "conv2d_" + std::to_string(conv++);
        break;
      case LayerKind::kRelu: l.name = "relu_" + std::to_string(relu++); break;
      case LayerKind::kSoftmax:
        l.name = "softmax_" + std::to_string(softmax++);
        break;
    }
  }
}

void init_weights(Network& net, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (LayerSpec& l : net.layers) {
    if (!l.trainable()) continue;
    const double scale = std::sqrt(2.0 / static_cast<double>(l.matrix_in()));
    for (double& w : l.weights.data) w = scale * normal(rng);
    for (double& b : l.bias.data) b = 0.0;
  }
  net.rng_seed = seed;
}

void FixedPointFormat::validate() const {
  if (total_bits < 2 || total_bits > 36)
    throw ConfigError("fixed-point total bits must be in [2, 36]");
  if (integer_bits < 1 || integer_bits > total_bits)
    throw ConfigError("fixed-point integer bits must be in [1, P]");
}

double FixedPointFormat::step() const {
  return std::ldexp(1.0, -(total_bits - integer_bits));
}

double FixedPointFormat::max_value() const {
  return std::ldexp(1.0, integer_bits - 1) - step();
}

double FixedPointFormat::min_value() const {
  return -std::ldexp(1.0, integer_bits - 1);
}

double quantize_value(double x, const FixedPointFormat& fmt) {
  const double s = fmt.step();
  double q = std::round(x / s) * s;
  return std::clamp(q, fmt.min_value(), fmt.max_value());
}

Network quantize_network(const Network& net, const FixedPointFormat& fmt) {
  fmt.validate();
  Network out = net;
  for (LayerSpec& l : out.layers) {
    if (!l.trainable()) continue;
    for (double& w : l.weights.data) w = quantize_value(w, fmt);
    for (double& b : l.bias.data) b = quantize_value(b, fmt);
  }
  return out;
}

Mask Mask::all_alive(const Network& net) {
  Mask m;
  m.layers.resize(net.layers.size());
  for (std::size_t i = 0; i < net.layers.size(); ++i)
    if (net.layers[i].trainable())
      m.layers[i].assign(net.layers[i].weights.size(), 1);
  return m;
}

std::size_t Mask::masked_count() const {
  std::size_t n = 0;
  for (const auto& l : layers)
    for (std::uint8_t b : l)
      if (!b) ++n;
  return n;
}

void Mask::apply(Network& net) const {
  for (std::size_t i = 0; i < layers.size() && i < net.layers.size(); ++i)
    for (std::size_t j = 0; j < layers[i].size(); ++j)
      if (!layers[i][j]) net.layers[i].weights.data[j] = 0.0;
}

Tensor forward(const Network& net, const Tensor& batch) {
  return forward_all(net, batch).back();
}

double group_regularization(const Network& net,
                            const std::vector<GroupRef>& groups,
                            double lambda, std::vector<LayerGrads>* grads) {
  double term = 0.0;
  for (const GroupRef& g : groups) {
    const Tensor& w = net.layers[g.layer].weights;
    double sq = 0.0;
    for (std::size_t c : g.coords) sq += w.data[c] * w.data[c];
    const double norm = std::sqrt(sq);
    term += lambda * norm;
    if (grads != nullptr && norm > 0.0) {
      Tensor& gw = (*grads)[g.layer].weights;
      for (std::size_t c : g.coords)
        gw.data[c] += lambda * w.data[c] / norm;
    }
  }
  return term;
}

std::pair<double, std::vector<LayerGrads>> loss_and_grads(
    const Network& net, const Tensor& batch, const std::vector<int>& labels,
    double lambda, const std::vector<GroupRef>& groups, const Mask* mask) {
  const std::size_t n = batch_rows(batch);
  if (labels.size() != n)
    throw ShapeError("label count does not match batch size");

  std::vector<Tensor> acts = forward_all(net, batch);

  // Cross-entropy is fused with the softmax: when the final layer is an
  // explicit softmax, the loss is computed from its input.
  std::size_t top = net.layers.size();
  if (top > 0 && net.layers[top - 1].kind == LayerKind::kSoftmax) --top;
  const Tensor& logits = acts[top];
  const std::size_t classes = batch_cols(logits);

  std::vector<double> probs(logits.size());
  softmax_rows(logits.data.data(), probs.data(), n, classes);

  double loss = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const int y = labels[r];
    if (y < 0 || static_cast<std::size_t>(y) >= classes)
      throw UsageError("label out of range for network output width");
    loss -= std::log(std::max(probs[r * classes + y], 1e-300));
  }
  loss /= static_cast<double>(n);

  std::vector<LayerGrads> grads(net.layers.size());
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    if (net.layers[i].trainable()) {
      grads[i].weights = Tensor::zeros_like(net.layers[i].weights);
      grads[i].bias = Tensor::zeros_like(net.layers[i].bias);
    }
  }

  Tensor delta = Tensor::zeros(logits.shape);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < classes; ++j)
      delta.data[r * classes + j] =
          (probs[r * classes + j] - (labels[r] == static_cast<int>(j))) /
          static_cast<double>(n);

  for (std::size_t i = top; i-- > 0;)
    delta = backprop_layer(net.layers[i], acts[i], acts[i + 1], delta,
                           grads[i]);

  if (lambda > 0.0 && !groups.empty())
    loss += group_regularization(net, groups, lambda, &grads);

  if (!std::isfinite(loss)) {
    std::string where;
    for (std::size_t i = 0; i < net.layers.size(); ++i)
      if (!acts[i + 1].all_finite()) {
        where = net.layers[i].name.empty() ? layer_kind_name(net.layers[i].kind)
                                           : net.layers[i].name;
        break;
      }
    throw NumericError("non-finite loss" +
                       (where.empty() ? std::string() : " at layer " + where));
  }

  if (mask != nullptr) {
    for (std::size_t i = 0; i < mask->layers.size(); ++i)
      for (std::size_t j = 0; j < mask->layers[i].size(); ++j)
        if (!mask->layers[i][j]) grads[i].weights.data[j] = 0.0;
  }
  return {loss, std::move(grads)};
}

AdamState AdamState::init(const Network& net, double lr) {
  AdamState s;
  s.lr = lr;
  s.m.resize(net.layers.size());
  s.v.resize(net.layers.size());
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    if (!net.layers[i].trainable()) continue;
    s.m[i].weights = Tensor::zeros_like(net.layers[i].weights);
    s.m[i].bias = Tensor::zeros_like(net.layers[i].bias);
    s.v[i].weights = Tensor::zeros_like(net.layers[i].weights);
    s.v[i].bias = Tensor::zeros_like(net.layers[i].bias);
  }
  return s;
}

namespace {

void adam_update(std::vector<double>& param, const std::vector<double>& grad,
                 std::vector<double>& m, std::vector<double>& v,
                 const AdamState& s, double bc1, double bc2) {
  for (std::size_t i = 0; i < param.size(); ++i) {
    m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * grad[i];
    v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * grad[i] * grad[i];
    const double mhat = m[i] / bc1;
    const double vhat = v[i] / bc2;
    param[i] -= s.lr * mhat / (std::sqrt(vhat) + s.epsilon);
  }
}

}  // namespace

void adam_step(Network& net, const std::vector<LayerGrads>& grads,
               AdamState& state, const Mask* mask) {
  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, state.step);
  const double bc2 = 1.0 - std::pow(state.beta2, state.step);
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    if (!net.layers[i].trainable()) continue;
    adam_update(net.layers[i].weights.data, grads[i].weights.data,
                state.m[i].weights.data, state.v[i].weights.data, state, bc1,
                bc2);
    adam_update(net.layers[i].bias.data, grads[i].bias.data,
                state.m[i].bias.data, state.v[i].bias.data, state, bc1, bc2);
  }
  if (mask != nullptr) mask->apply(net);
}

namespace {

Tensor gather_rows(const Tensor& features, const std::vector<std::size_t>& idx,
                   std::size_t begin, std::size_t end) {
  const std::size_t cols = batch_cols(features);
  std::vector<std::size_t> shape = features.shape;
  shape[0] = end - begin;
  Tensor out = Tensor::zeros(shape);
  for (std::size_t r = begin; r < end; ++r)
    std::copy_n(features.data.data() + idx[r] * cols, cols,
                out.data.data() + (r - begin) * cols);
  return out;
}

}  // namespace

double fit(Network& net, const Dataset& train, const TrainConfig& cfg,
           const std::vector<GroupRef>& groups, const Mask* mask) {
  if (train.size() == 0) throw UsageError("training dataset is empty");
  AdamState state = AdamState::init(net, cfg.lr);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(cfg.seed);
  double epoch_loss = 0.0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t begin = 0; begin < train.size();
         begin += cfg.batch_size) {
      const std::size_t end = std::min(begin + cfg.batch_size, train.size());
      Tensor batch = gather_rows(train.features, order, begin, end);
      std::vector<int> labels(end - begin);
      for (std::size_t r = begin; r < end; ++r)
        labels[r - begin] = train.labels[order[r]];
      auto [loss, grads] =
          loss_and_grads(net, batch, labels, cfg.lambda, groups, mask);
      adam_step(net, grads, state, mask);
      epoch_loss += loss;
      ++batches;
    }
    epoch_loss /= static_cast<double>(std::max<std::size_t>(batches, 1));
  }
  return epoch_loss;
}

double evaluate(const Network& net, const Dataset& data,
                const std::optional<FixedPointFormat>& fmt) {
  if (data.size() == 0) throw UsageError("evaluation dataset is empty");
  const Network* target = &net;
  Network quantized;
  if (fmt.has_value()) {
    quantized = quantize_network(net, *fmt);
    target = &quantized;
  }
  Tensor logits = forward(*target, data.features);
  const std::size_t n = data.size();
  const std::size_t classes = logits.size() / n;
  std::size_t correct = 0;
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = logits.data.data() + r * classes;
    std::size_t arg = 0;
    for (std::size_t j = 1; j < classes; ++j)
      if (row[j] > row[arg]) arg = j;
    if (static_cast<int>(arg) == data.labels[r]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

}  // namespace rap
