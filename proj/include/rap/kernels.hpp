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

#ifndef RAP_KERNELS_HPP_
#define RAP_KERNELS_HPP_

#include <cstddef>
#include <vector>

namespace rap::kernels {

// out = a (n x k) * b (k x m). The OpenMP variant parallelizes over output
// rows; each output element is accumulated by exactly one thread in a fixed
// order, so results are bitwise identical to the serial reference.
void matmul_serial(const double* a, const double* b, double* out,
                   std::size_t n, std::size_t k, std::size_t m);
void matmul(const double* a, const double* b, double* out, std::size_t n,
            std::size_t k, std::size_t m);

std::vector<double> transpose(const double* a, std::size_t n, std::size_t m);

// Patch matrix for valid, stride-1 convolution of one H x W x C image with a
// kh x kw kernel. Row r = oy*ow + ox, column (ky*kw + kx)*C + c, so the
// column layout matches a (kh, kw, c_in, c_out) weight tensor reshaped
// row-major to (kh*kw*c_in, c_out).
void im2col_serial(const double* img, std::size_t h, std::size_t w,
                   std::size_t c, std::size_t kh, std::size_t kw,
                   double* out);
void im2col(const double* img, std::size_t h, std::size_t w, std::size_t c,
            std::size_t kh, std::size_t kw, double* out);

// Scatter-add of a patch-matrix gradient back onto the image gradient.
void col2im(const double* col, std::size_t h, std::size_t w, std::size_t c,
            std::size_t kh, std::size_t kw, double* img_grad);

}  // namespace rap::kernels

#endif  // RAP_KERNELS_HPP_
