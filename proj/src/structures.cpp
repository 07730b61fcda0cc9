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

#include "rap/structures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "rap/errors.hpp"

#include "json.hpp"

namespace rap {

std::vector<double> transpose_flatten(const Tensor& weights, std::size_t n_in,
                                      std::size_t n_out) {
  if (weights.size() != n_in * n_out)
    throw ShapeError("transpose_flatten: weight count mismatch");
  std::vector<double> out(n_in * n_out);
  for (std::size_t k = 0; k < n_in; ++k)
    for (std::size_t o = 0; o < n_out; ++o)
      out[o * n_in + k] = weights.data[k * n_out + o];
  return out;
}

std::vector<double> transpose_flatten(const LayerSpec& layer) {
  if (!layer.trainable())
    throw ShapeError("transpose_flatten: layer has no weight matrix");
  return transpose_flatten(layer.weights, layer.matrix_in(),
                           layer.matrix_out());
}

std::vector<ResourceGroup> extract_groups(const LayerSpec& layer,
                                          const LayerHwConfig& cfg,
                                          std::size_t layer_id) {
  cfg.validate();
  if (!layer.trainable())
    throw ConfigError("cannot extract groups from a non-trainable layer");
  const std::size_t n_weights = layer.weight_count();
  const ResourceVector res = group_resource(cfg);
  std::vector<ResourceGroup> groups;

  if (cfg.granularity == Granularity::kUnstructured) {
    groups.reserve(n_weights);
    for (std::size_t f = 0; f < n_weights; ++f) {
      ResourceGroup g;
      g.layer_id = layer_id;
      g.group_index = f;
      g.coords = {f};
      g.resource = res;
      groups.push_back(std::move(g));
    }
    return groups;
  }

  if (cfg.reuse_factor > static_cast<long>(n_weights))
    throw ConfigError("layer " + layer.name + ": reuse factor exceeds " +
                      std::to_string(n_weights) + " weights");
  const std::size_t rf = static_cast<std::size_t>(cfg.reuse_factor);
  const std::size_t bf = (n_weights + rf - 1) / rf;
  // The weight vector is implicitly zero-padded to BF*RF; padded slots are
  // permanently pruned and never appear as coordinates.
  const std::size_t chunk_span =
      cfg.granularity == Granularity::kBramAware
          ? rf * static_cast<std::size_t>(
                     consecutive_groups(cfg.precision.total_bits))
          : rf;
  const std::size_t n_groups = (bf * rf + chunk_span - 1) / chunk_span;
  groups.reserve(n_groups);
  for (std::size_t gi = 0; gi < n_groups; ++gi) {
    ResourceGroup g;
    g.layer_id = layer_id;
    g.group_index = gi;
    const std::size_t lo = gi * chunk_span;
    const std::size_t hi = std::min(lo + chunk_span, n_weights);
    for (std::size_t f = lo; f < hi; ++f) g.coords.push_back(f);
    g.resource = res;
    if (cfg.granularity == Granularity::kBramAware) {
      // A ragged final memory group owns fewer than C multipliers; count
      // only the chunks it actually covers.
      const std::size_t chunks = (hi - 1) / rf - lo / rf + 1;
      g.resource.dsp = static_cast<long>(chunks) *
                       dsp_per_multiplier(cfg.precision.total_bits);
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

std::vector<ResourceGroup> extract_network_groups(
    const Network& net, const HardwareConfig& hwcfg) {
  std::vector<ResourceGroup> all;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    if (!net.layers[i].trainable()) continue;
    std::vector<ResourceGroup> groups =
        extract_groups(net.layers[i], hwcfg.for_layer(net.layers[i].name), i);
    all.insert(all.end(), std::make_move_iterator(groups.begin()),
               std::make_move_iterator(groups.end()));
  }
  return all;
}

std::vector<std::vector<std::size_t>> alg1_trace(std::size_t n_in,
                                                 std::size_t n_out, int rf) {
  if (rf < 1) throw ConfigError("reuse factor must be >= 1");
  const std::size_t n = n_in * n_out;
  const std::size_t rfu = static_cast<std::size_t>(rf);
  const std::size_t bf = (n + rfu - 1) / rfu;
  std::vector<std::vector<std::size_t>> owned(bf);
  // Cycle i, unrolled instance j: w_index starts at i and advances by RF per
  // instance, so instance j touches flat index i + j*RF.
  for (std::size_t i = 0; i < rfu; ++i) {
    for (std::size_t j = 0; j < bf; ++j) {
      const std::size_t w_index = i + j * rfu;
      if (w_index < n) owned[j].push_back(w_index);
    }
  }
  for (auto& v : owned) std::sort(v.begin(), v.end());
  return owned;
}

std::vector<GroupRef> to_group_refs(const std::vector<ResourceGroup>& groups,
                                    const Network& net) {
  std::vector<GroupRef> refs;
  refs.reserve(groups.size());
  for (const ResourceGroup& g : groups) {
    const LayerSpec& layer = net.layers[g.layer_id];
    GroupRef r;
    r.layer = g.layer_id;
    r.coords.reserve(g.coords.size());
    for (std::size_t f : g.coords)
      r.coords.push_back(
          tflat_to_rowmajor(f, layer.matrix_in(), layer.matrix_out()));
    refs.push_back(std::move(r));
  }
  return refs;
}

double group_norm(const ResourceGroup& group, const Network& net) {
  const LayerSpec& layer = net.layers[group.layer_id];
  const std::size_t n_in = layer.matrix_in(), n_out = layer.matrix_out();
  double sq = 0.0;
  for (std::size_t f : group.coords) {
    const double w = layer.weights.data[tflat_to_rowmajor(f, n_in, n_out)];
    sq += w * w;
  }
  return std::sqrt(sq);
}

void dump_groups_json(const std::vector<ResourceGroup>& groups,
                      const std::string& path) {
  nlohmann::json arr = nlohmann::json::array();
  for (const ResourceGroup& g : groups) {
    arr.push_back({{"layer", g.layer_id},
                   {"index", g.group_index},
                   {"coords", g.coords},
                   {"resource", {{"dsp", g.resource.dsp},
                                 {"bram", g.resource.bram}}}});
  }
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write group dump: " + path);
  out << arr.dump(2) << "\n";
}

}  // namespace rap
