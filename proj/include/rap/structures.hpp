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

#ifndef RAP_STRUCTURES_HPP_
#define RAP_STRUCTURES_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "rap/hw.hpp"
#include "rap/nn.hpp"

namespace rap {

// One prunable structure: the weights sharing a multiplier (dsp_aware), a
// memory block (bram_aware) or a single weight (unstructured). Coordinates
// index the layer's transposed-flattened weight vector; padded slots of a
// ragged final block are excluded.
struct ResourceGroup {
  std::size_t layer_id = 0;
  std::size_t group_index = 0;
  std::vector<std::size_t> coords;
  ResourceVector resource;
  double norm = 0.0;  // filled by scoring
};

// Row-major flattening of the transpose: element o*n_in + k of the result is
// W[k][o]. Conv kernels are first viewed as their (kh*kw*c_in, c_out) matrix.
std::vector<double> transpose_flatten(const Tensor& weights,
                                      std::size_t n_in, std::size_t n_out);
std::vector<double> transpose_flatten(const LayerSpec& layer);

// Index maps between the transposed-flattened vector and row-major storage.
inline std::size_t tflat_to_rowmajor(std::size_t f, std::size_t n_in,
                                     std::size_t n_out) {
  return (f % n_in) * n_out + f / n_in;
}
inline std::size_t rowmajor_to_tflat(std::size_t r, std::size_t n_in,
                                     std::size_t n_out) {
  return (r % n_out) * n_in + r / n_out;
}

std::vector<ResourceGroup> extract_groups(const LayerSpec& layer,
                                          const LayerHwConfig& cfg,
                                          std::size_t layer_id);

// All groups of all trainable layers, in layer order.
std::vector<ResourceGroup> extract_network_groups(const Network& net,
                                                  const HardwareConfig& hwcfg);

// Index arithmetic of the Resource-strategy matrix multiply: multiplier
// instance j owns transposed-flat indices {j*RF, ..., j*RF + RF - 1} clipped
// to n_in * n_out. Independent reference for the grouping above.
std::vector<std::vector<std::size_t>> alg1_trace(std::size_t n_in,
                                                 std::size_t n_out, int rf);

// Row-major coordinate view for regularization / fine-tuning.
std::vector<GroupRef> to_group_refs(const std::vector<ResourceGroup>& groups,
                                    const Network& net);

double group_norm(const ResourceGroup& group, const Network& net);

void dump_groups_json(const std::vector<ResourceGroup>& groups,
                      const std::string& path);

}  // namespace rap

#endif  // RAP_STRUCTURES_HPP_
