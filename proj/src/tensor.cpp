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

#include "rap/tensor.hpp"

#include <cmath>

#include "rap/errors.hpp"

namespace rap {

std::size_t numel(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

Tensor::Tensor(std::vector<std::size_t> s, std::vector<double> d)
    : shape(std::move(s)), data(std::move(d)) {
  if (numel(shape) != data.size())
    throw ShapeError("tensor shape does not match data length");
}

Tensor Tensor::zeros(std::vector<std::size_t> s) {
  Tensor t;
  t.shape = std::move(s);
  t.data.assign(numel(t.shape), 0.0);
  return t;
}

Tensor Tensor::zeros_like(const Tensor& other) { return zeros(other.shape); }

bool Tensor::all_finite() const {
  for (double x : data)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace rap
