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

#ifndef RAP_TENSOR_HPP_
#define RAP_TENSOR_HPP_

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace rap {

// Dense row-major tensor. Training runs in 64-bit floats; fixed-point
// formats are applied by rounding copies of the data.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::vector<std::size_t> s, std::vector<double> d);

  static Tensor zeros(std::vector<std::size_t> s);
  static Tensor zeros_like(const Tensor& other);

  std::size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }

  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }
  bool all_finite() const;
};

std::size_t numel(const std::vector<std::size_t>& shape);

}  // namespace rap

#endif  // RAP_TENSOR_HPP_
