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

#ifndef RAP_KNAPSACK_HPP_
#define RAP_KNAPSACK_HPP_

#include <cstddef>
#include <string>
#include <vector>

namespace rap {

// 0-1 knapsack instance. weights[k][i] is the consumption of item i in
// resource dimension k; resource counts are integers by construction.
struct KnapsackInstance {
  std::vector<double> values;
  std::vector<std::vector<long>> weights;
  std::vector<long> capacities;

  std::size_t item_count() const { return values.size(); }
  std::size_t dimension_count() const { return capacities.size(); }
  void validate() const;
};

struct Selection {
  std::vector<bool> x;
  double objective = 0.0;
  bool proven_optimal = false;
};

// Exact dynamic program over integer weights (single dimension).
Selection solve_1d(const std::vector<double>& values,
                   const std::vector<long>& weights, long capacity);

// Depth-first branch-and-bound with a fractional bound on the aggregated
// surrogate constraint. Returns the best incumbent on timeout
// (proven_optimal = false); the incumbent is never worse than the
// greedy-by-ratio solution.
Selection solve_mdkp(const KnapsackInstance& inst,
                     double time_limit_seconds = 10.0);

// Exhaustive 2^n oracle, n <= 20.
Selection brute_force(const KnapsackInstance& inst);

std::string to_json(const KnapsackInstance& inst);

}  // namespace rap

#endif  // RAP_KNAPSACK_HPP_
