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

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "rap/errors.hpp"
#include "rap/knapsack.hpp"

using rap::KnapsackInstance;
using rap::Selection;

namespace {

KnapsackInstance random_instance(std::mt19937_64& rng, std::size_t max_n,
                                 std::size_t max_m) {
  std::uniform_int_distribution<std::size_t> n_dist(1, max_n);
  std::uniform_int_distribution<std::size_t> m_dist(1, max_m);
  std::uniform_real_distribution<double> v_dist(0.0, 10.0);
  std::uniform_int_distribution<long> w_dist(0, 8);

  KnapsackInstance inst;
  const std::size_t n = n_dist(rng), m = m_dist(rng);
  inst.values.resize(n);
  for (double& v : inst.values) v = v_dist(rng);
  inst.weights.assign(m, std::vector<long>(n));
  for (auto& row : inst.weights)
    for (long& w : row) w = w_dist(rng);
  inst.capacities.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    long total = 0;
    for (long w : inst.weights[k]) total += w;
    std::uniform_int_distribution<long> c_dist(0, total);
    inst.capacities[k] = c_dist(rng);
  }
  return inst;
}

bool feasible(const KnapsackInstance& inst, const Selection& sel) {
  for (std::size_t k = 0; k < inst.dimension_count(); ++k) {
    long used = 0;
    for (std::size_t i = 0; i < inst.item_count(); ++i)
      if (sel.x[i]) used += inst.weights[k][i];
    if (used > inst.capacities[k]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("solve_1d fixtures") {
  SUBCASE("zero capacity selects nothing") {
    const Selection sel = rap::solve_1d({5.0}, {3}, 0);
    CHECK(sel.objective == 0.0);
    CHECK_FALSE(sel.x[0]);
    CHECK(sel.proven_optimal);
  }
  SUBCASE("classic three-item instance") {
    const Selection sel = rap::solve_1d({6.0, 10.0, 12.0}, {1, 2, 3}, 5);
    CHECK(sel.objective == 22.0);
    CHECK_FALSE(sel.x[0]);
    CHECK(sel.x[1]);
    CHECK(sel.x[2]);
  }
  SUBCASE("unit weights degenerate to top-k") {
    const Selection sel =
        rap::solve_1d({1.0, 9.0, 3.0, 7.0, 5.0}, {1, 1, 1, 1, 1}, 2);
    CHECK(sel.objective == 16.0);
    CHECK(sel.x == std::vector<bool>{false, true, false, true, false});
  }
  SUBCASE("negative capacity is rejected") {
    CHECK_THROWS_AS(rap::solve_1d({1.0}, {1}, -1), rap::UsageError);
  }
}

TEST_CASE("solve_mdkp fixtures") {
  SUBCASE("two-constraint instance from exhaustive enumeration") {
    KnapsackInstance inst;
    inst.values = {10.0, 7.0, 6.0};
    inst.weights = {{5, 4, 3}, {2, 3, 3}};
    inst.capacities = {7, 5};
    const Selection sel = rap::solve_mdkp(inst);
    CHECK(sel.objective == 10.0);
    CHECK(sel.x == std::vector<bool>{true, false, false});
    CHECK(sel.proven_optimal);
    CHECK(feasible(inst, sel));
  }
  SUBCASE("slack capacities select everything") {
    KnapsackInstance inst;
    inst.values = {1.0, 2.0, 3.0};
    inst.weights = {{4, 5, 6}};
    inst.capacities = {15};
    const Selection sel = rap::solve_mdkp(inst);
    CHECK(sel.x == std::vector<bool>{true, true, true});
    CHECK(sel.objective == 6.0);
  }
  SUBCASE("empty instance") {
    KnapsackInstance inst;
    inst.capacities = {0};
    inst.weights = {{}};
    const Selection sel = rap::solve_mdkp(inst);
    CHECK(sel.objective == 0.0);
    CHECK(sel.proven_optimal);
  }
}

// Zero-weight items must survive the bound computation even when the
// remaining fractional room has drifted slightly below zero; this instance
// once made the solver claim a suboptimal answer was proven optimal.
TEST_CASE("zero-weight items at a full node stay in the bound") {
  KnapsackInstance inst;
  inst.values = {9.563295000906143,  8.68122508147475,   6.372708839969134,
                 1.0832620368741748, 3.9214601937251654, 0.40363815837626815,
                 8.11571734637156,   5.1513486052666835, 9.187201821972385,
                 7.469436972532319,  9.700754568297512};
  inst.weights = {{0, 8, 1, 2, 4, 0, 9, 0, 0, 1, 9}};
  inst.capacities = {12};
  const Selection got = rap::solve_mdkp(inst);
  const Selection want = rap::brute_force(inst);
  CHECK(got.proven_optimal);
  CHECK(got.objective == doctest::Approx(want.objective).epsilon(1e-12));
  CHECK(got.x == want.x);
}

TEST_CASE("brute_force guards its domain") {
  KnapsackInstance inst;
  inst.values.assign(21, 1.0);
  inst.weights = {std::vector<long>(21, 1)};
  inst.capacities = {5};
  CHECK_THROWS_AS(rap::brute_force(inst), rap::UsageError);
}

TEST_CASE("solvers match the brute-force oracle on random instances") {
  std::mt19937_64 rng(20260826);
  for (int trial = 0; trial < 120; ++trial) {
    KnapsackInstance inst = random_instance(rng, 15, 3);
    const Selection want = rap::brute_force(inst);
    const Selection got = rap::solve_mdkp(inst);
    CHECK(got.proven_optimal);
    CHECK(feasible(inst, got));
    CHECK(got.objective == doctest::Approx(want.objective).epsilon(1e-9));

    if (inst.dimension_count() == 1) {
      const Selection dp =
          rap::solve_1d(inst.values, inst.weights[0], inst.capacities[0]);
      CHECK(dp.objective == doctest::Approx(want.objective).epsilon(1e-9));
    }
  }
}

TEST_CASE("solve_1d matches brute_force on dedicated 1-d instances") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    KnapsackInstance inst = random_instance(rng, 12, 1);
    const Selection want = rap::brute_force(inst);
    const Selection dp =
        rap::solve_1d(inst.values, inst.weights[0], inst.capacities[0]);
    CHECK(dp.objective == doctest::Approx(want.objective).epsilon(1e-9));
    CHECK(feasible(inst, dp));
  }
}

TEST_CASE("scaling all values preserves a unique optimum's selection") {
  KnapsackInstance inst;
  inst.values = {6.0, 10.0, 12.0, 1.0};
  inst.weights = {{1, 2, 3, 2}};
  inst.capacities = {5};
  const Selection base = rap::solve_mdkp(inst);
  for (double& v : inst.values) v *= 37.5;
  const Selection scaled = rap::solve_mdkp(inst);
  CHECK(base.x == scaled.x);
}

TEST_CASE("instances serialize to JSON") {
  KnapsackInstance inst;
  inst.values = {1.5};
  inst.weights = {{2}};
  inst.capacities = {3};
  const std::string text = rap::to_json(inst);
  CHECK(text.find("1.5") != std::string::npos);
  CHECK(text.find("capacities") != std::string::npos);
}
