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

// Compares the serial reference kernels against the OpenMP variants and
// checks that both produce bitwise identical results.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "rap/kernels.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
  return std::chrono::duration<double>(clock_type::now() - start).count();
}

template <typename F>
double time_best_of(int reps, F&& fn) {
  double best = 1e30;
  for (int r = 0; r < reps; ++r) {
    const auto start = clock_type::now();
    fn();
    best = std::min(best, seconds_since(start));
  }
  return best;
}

}  // namespace

int main() {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);

  std::printf("%-24s %12s %12s %9s %s\n", "kernel", "serial [s]", "omp [s]",
              "speedup", "bitwise");

  for (std::size_t n : {128u, 256u, 512u}) {
    std::vector<double> a(n * n), b(n * n), c0(n * n), c1(n * n);
    for (double& x : a) x = dist(rng);
    for (double& x : b) x = dist(rng);

    const double ts = time_best_of(3, [&] {
      rap::kernels::matmul_serial(a.data(), b.data(), c0.data(), n, n, n);
    });
    const double tp = time_best_of(3, [&] {
      rap::kernels::matmul(a.data(), b.data(), c1.data(), n, n, n);
    });
    const bool same = c0 == c1;
    std::printf("matmul %4zux%-4zu         %12.6f %12.6f %8.2fx %s\n", n, n,
                ts, tp, ts / tp, same ? "yes" : "NO");
    if (!same) return 1;
  }

  {
    const std::size_t h = 128, w = 128, c = 8, kh = 3, kw = 3;
    std::vector<double> img(h * w * c);
    for (double& x : img) x = dist(rng);
    const std::size_t rows = (h - kh + 1) * (w - kw + 1);
    std::vector<double> col0(rows * kh * kw * c), col1(col0.size());

    const double ts = time_best_of(3, [&] {
      rap::kernels::im2col_serial(img.data(), h, w, c, kh, kw, col0.data());
    });
    const double tp = time_best_of(3, [&] {
      rap::kernels::im2col(img.data(), h, w, c, kh, kw, col1.data());
    });
    const bool same = col0 == col1;
    std::printf("im2col 128x128x8 (3x3)   %12.6f %12.6f %8.2fx %s\n", ts, tp,
                ts / tp, same ? "yes" : "NO");
    if (!same) return 1;
  }
  return 0;
}
