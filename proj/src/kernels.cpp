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

#include "rap/kernels.hpp"

#include <cstdint>

namespace rap::kernels {

void matmul_serial(const double* a, const double* b, double* out,
                   std::size_t n, std::size_t k, std::size_t m) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* ai = a + i * k;
    double* oi = out + i * m;
    for (std::size_t j = 0; j < m; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += ai[p] * b[p * m + j];
      oi[j] = acc;
    }
  }
}

void matmul(const double* a, const double* b, double* out, std::size_t n,
            std::size_t k, std::size_t m) {
  const std::int64_t rows = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < rows; ++i) {
    const double* ai = a + static_cast<std::size_t>(i) * k;
    double* oi = out + static_cast<std::size_t>(i) * m;
    for (std::size_t j = 0; j < m; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += ai[p] * b[p * m + j];
      oi[j] = acc;
    }
  }
}

std::vector<double> transpose(const double* a, std::size_t n, std::size_t m) {
  std::vector<double> out(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) out[j * n + i] = a[i * m + j];
  return out;
}

void im2col_serial(const double* img, std::size_t h, std::size_t w,
                   std::size_t c, std::size_t kh, std::size_t kw,
                   double* out) {
  const std::size_t oh = h - kh + 1, ow = w - kw + 1;
  const std::size_t cols = kh * kw * c;
  for (std::size_t oy = 0; oy < oh; ++oy) {
    for (std::size_t ox = 0; ox < ow; ++ox) {
      double* row = out + (oy * ow + ox) * cols;
      for (std::size_t ky = 0; ky < kh; ++ky)
        for (std::size_t kx = 0; kx < kw; ++kx)
          for (std::size_t ch = 0; ch < c; ++ch)
            row[(ky * kw + kx) * c + ch] =
                img[((oy + ky) * w + (ox + kx)) * c + ch];
    }
  }
}

void im2col(const double* img, std::size_t h, std::size_t w, std::size_t c,
            std::size_t kh, std::size_t kw, double* out) {
  const std::size_t oh = h - kh + 1, ow = w - kw + 1;
  const std::size_t cols = kh * kw * c;
  const std::int64_t rows = static_cast<std::int64_t>(oh * ow);
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < rows; ++r) {
    const std::size_t oy = static_cast<std::size_t>(r) / ow;
    const std::size_t ox = static_cast<std::size_t>(r) % ow;
    double* row = out + static_cast<std::size_t>(r) * cols;
    for (std::size_t ky = 0; ky < kh; ++ky)
      for (std::size_t kx = 0; kx < kw; ++kx)
        for (std::size_t ch = 0; ch < c; ++ch)
          row[(ky * kw + kx) * c + ch] =
              img[((oy + ky) * w + (ox + kx)) * c + ch];
  }
}

void col2im(const double* col, std::size_t h, std::size_t w, std::size_t c,
            std::size_t kh, std::size_t kw, double* img_grad) {
  const std::size_t oh = h - kh + 1, ow = w - kw + 1;
  const std::size_t cols = kh * kw * c;
  for (std::size_t oy = 0; oy < oh; ++oy) {
    for (std::size_t ox = 0; ox < ow; ++ox) {
      const double* row = col + (oy * ow + ox) * cols;
      for (std::size_t ky = 0; ky < kh; ++ky)
        for (std::size_t kx = 0; kx < kw; ++kx)
          for (std::size_t ch = 0; ch < c; ++ch)
            img_grad[((oy + ky) * w + (ox + kx)) * c + ch] +=
                row[(ky * kw + kx) * c + ch];
    }
  }
}

}  // namespace rap::kernels
