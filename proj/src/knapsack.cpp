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

#include "rap/knapsack.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "rap/errors.hpp"

#include "json.hpp"

namespace rap {

namespace {

constexpr double kObjectiveEps = 1e-9;

double selection_objective(const std::vector<double>& values,
                           const std::vector<bool>& x) {
  double obj = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (x[i]) obj += values[i];
  return obj;
}

}  // namespace

void KnapsackInstance::validate() const {
  if (capacities.empty()) throw UsageError("knapsack needs >= 1 dimension");
  for (long c : capacities)
    if (c < 0) throw UsageError("knapsack capacity must be non-negative");
  for (const auto& row : weights) {
    if (row.size() != values.size())
      throw UsageError("knapsack weight row length mismatch");
    for (long u : row)
      if (u < 0) throw UsageError("knapsack weights must be non-negative");
  }
  if (weights.size() != capacities.size())
    throw UsageError("knapsack dimension count mismatch");
  for (double v : values)
    if (v < 0.0 || !std::isfinite(v))
      throw UsageError("knapsack values must be finite and non-negative");
}

Selection solve_1d(const std::vector<double>& values,
                   const std::vector<long>& weights, long capacity) {
  if (capacity < 0) throw UsageError("knapsack capacity must be non-negative");
  if (weights.size() != values.size())
    throw UsageError("knapsack weight/value length mismatch");
  const std::size_t n = values.size();
  const std::size_t cap = static_cast<std::size_t>(capacity);

  // dp[w] = best value with the items seen so far and capacity w;
  // take[i][w] records whether item i was used at that state. Skipping wins
  // ties so reconstruction prefers lower-index items.
  std::vector<double> dp(cap + 1, 0.0);
  std::vector<std::vector<std::uint8_t>> take(n,
                                              std::vector<std::uint8_t>(cap + 1, 0));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t u = static_cast<std::size_t>(weights[i]);
    if (weights[i] < 0) throw UsageError("negative item weight");
    for (std::size_t w = cap + 1; w-- > 0;) {
      if (u > w) break;
      const double cand = dp[w - u] + values[i];
      if (cand > dp[w] + kObjectiveEps) {
        dp[w] = cand;
        take[i][w] = 1;
      }
    }
  }

  Selection sel;
  sel.x.assign(n, false);
  std::size_t w = cap;
  for (std::size_t i = n; i-- > 0;) {
    if (take[i][w]) {
      sel.x[i] = true;
      w -= static_cast<std::size_t>(weights[i]);
    }
  }
  sel.objective = selection_objective(values, sel.x);
  sel.proven_optimal = true;
  return sel;
}

namespace {

struct BranchItem {
  std::size_t index = 0;      // position in the original instance
  double value = 0.0;
  std::vector<long> weight;   // per kept dimension
  double aggregated = 0.0;    // sum of weights normalized by capacity
};

// Fractional greedy over the aggregated surrogate constraint
// sum_k (u_k / c_k) x <= remaining aggregate. Valid upper bound because any
// point feasible for the original constraints is feasible for the surrogate.
class SurrogateBound {
 public:
  explicit SurrogateBound(const std::vector<BranchItem>& items)
      : items_(items) {
    bound_order_.resize(items.size());
    std::iota(bound_order_.begin(), bound_order_.end(), 0);
    std::stable_sort(bound_order_.begin(), bound_order_.end(),
                     [&](std::size_t a, std::size_t b) {
                       const double ra = ratio(items[a]), rb = ratio(items[b]);
                       if (ra != rb) return ra > rb;
                       return items[a].index < items[b].index;
                     });
  }

  double upper_bound(const std::vector<std::int8_t>& decided,
                     double value_so_far, double aggregate_left) const {
    double bound = value_so_far;
    // aggregate_left accumulates floating error along the search path and
    // can drift slightly negative at a full node. Clamp it so zero-weight
    // items are still counted and fractional terms stay non-negative.
    double room = std::max(aggregate_left, 0.0);
    for (std::size_t pos : bound_order_) {
      if (decided[pos] != -1) continue;
      const BranchItem& item = items_[pos];
      if (item.aggregated == 0.0) {
        bound += item.value;
      } else if (item.aggregated <= room) {
        bound += item.value;
        room -= item.aggregated;
      } else if (item.aggregated > 0.0) {
        bound += item.value * (room / item.aggregated);
        break;
      }
    }
    return bound;
  }

 private:
  static double ratio(const BranchItem& item) {
    return item.aggregated > 0.0 ? item.value / item.aggregated
                                 : std::numeric_limits<double>::infinity();
  }
  const std::vector<BranchItem>& items_;
  std::vector<std::size_t> bound_order_;
};

struct MdkpSearch {
  const std::vector<BranchItem>* items = nullptr;
  const SurrogateBound* bound = nullptr;
  std::vector<std::size_t> branch_order;
  std::vector<std::int8_t> decided;  // -1 undecided, 0 out, 1 in
  std::vector<long> remaining;
  double best_value = -1.0;
  std::vector<std::int8_t> best;
  std::chrono::steady_clock::time_point deadline;
  bool timed_out = false;
  long nodes = 0;

  void dfs(std::size_t depth, double value, double aggregate_left) {
    if (++nodes % 4096 == 0 &&
        std::chrono::steady_clock::now() > deadline) {
      timed_out = true;
      return;
    }
    if (depth == branch_order.size()) {
      if (value > best_value + kObjectiveEps) {
        best_value = value;
        best = decided;
      }
      return;
    }
    if (bound->upper_bound(decided, value, aggregate_left) <=
        best_value + kObjectiveEps)
      return;

    const std::size_t pos = branch_order[depth];
    const BranchItem& item = (*items)[pos];

    bool fits = true;
    for (std::size_t k = 0; k < remaining.size(); ++k)
      if (item.weight[k] > remaining[k]) {
        fits = false;
        break;
      }
    if (fits) {
      decided[pos] = 1;
      for (std::size_t k = 0; k < remaining.size(); ++k)
        remaining[k] -= item.weight[k];
      dfs(depth + 1, value + item.value, aggregate_left - item.aggregated);
      for (std::size_t k = 0; k < remaining.size(); ++k)
        remaining[k] += item.weight[k];
      if (timed_out) {
        decided[pos] = -1;
        return;
      }
    }
    decided[pos] = 0;
    dfs(depth + 1, value, aggregate_left);
    decided[pos] = -1;
  }
};

}  // namespace

Selection solve_mdkp(const KnapsackInstance& inst, double time_limit_seconds) {
  inst.validate();
  const std::size_t n = inst.item_count();
  const std::size_t m = inst.dimension_count();

  Selection sel;
  sel.x.assign(n, false);

  // Items that touch a zero-capacity dimension can never be selected; zero
  // capacity dimensions then carry no information and are dropped.
  std::vector<bool> excluded(n, false);
  std::vector<std::size_t> kept_dims;
  for (std::size_t k = 0; k < m; ++k) {
    if (inst.capacities[k] == 0) {
      for (std::size_t i = 0; i < n; ++i)
        if (inst.weights[k][i] > 0) excluded[i] = true;
    } else {
      kept_dims.push_back(k);
    }
  }

  std::vector<BranchItem> items;
  std::vector<double> inv_capacity;
  for (std::size_t k : kept_dims)
    inv_capacity.push_back(1.0 / static_cast<double>(inst.capacities[k]));
  for (std::size_t i = 0; i < n; ++i) {
    if (excluded[i]) continue;
    BranchItem item;
    item.index = i;
    item.value = inst.values[i];
    for (std::size_t d = 0; d < kept_dims.size(); ++d) {
      item.weight.push_back(inst.weights[kept_dims[d]][i]);
      item.aggregated += inst.weights[kept_dims[d]][i] * inv_capacity[d];
    }
    items.push_back(std::move(item));
  }

  if (items.empty()) {
    sel.objective = 0.0;
    sel.proven_optimal = true;
    return sel;
  }

  // Branch order: value / (1 + aggregated normalized weight), high to low,
  // ties by original index for determinism.
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     const double ra = items[a].value / (1.0 + items[a].aggregated);
                     const double rb = items[b].value / (1.0 + items[b].aggregated);
                     if (ra != rb) return ra > rb;
                     return items[a].index < items[b].index;
                   });

  MdkpSearch search;
  SurrogateBound bound(items);
  search.items = &items;
  search.bound = &bound;
  search.branch_order = order;
  search.decided.assign(items.size(), -1);
  search.remaining.clear();
  for (std::size_t k : kept_dims) search.remaining.push_back(inst.capacities[k]);
  search.deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(time_limit_seconds));

  // Greedy-by-ratio incumbent so a timeout never returns worse than greedy.
  {
    std::vector<long> remaining = search.remaining;
    std::vector<std::int8_t> greedy(items.size(), 0);
    double value = 0.0;
    for (std::size_t pos : order) {
      bool fits = true;
      for (std::size_t k = 0; k < remaining.size(); ++k)
        if (items[pos].weight[k] > remaining[k]) {
          fits = false;
          break;
        }
      if (!fits) continue;
      greedy[pos] = 1;
      value += items[pos].value;
      for (std::size_t k = 0; k < remaining.size(); ++k)
        remaining[k] -= items[pos].weight[k];
    }
    search.best_value = value;
    search.best = greedy;
  }

  // Full surrogate budget: each kept dimension contributes c_k / c_k = 1.
  search.dfs(0, 0.0, static_cast<double>(kept_dims.size()));

  for (std::size_t pos = 0; pos < items.size(); ++pos)
    if (search.best[pos] == 1) sel.x[items[pos].index] = true;
  sel.objective = selection_objective(inst.values, sel.x);
  sel.proven_optimal = !search.timed_out;
  return sel;
}

Selection brute_force(const KnapsackInstance& inst) {
  inst.validate();
  const std::size_t n = inst.item_count();
  if (n > 20) throw UsageError("brute force limited to n <= 20 items");
  const std::size_t m = inst.dimension_count();

  Selection best;
  best.x.assign(n, false);
  best.objective = 0.0;
  best.proven_optimal = true;

  for (std::uint64_t subset = 0; subset < (1ull << n); ++subset) {
    double value = 0.0;
    bool feasible = true;
    for (std::size_t k = 0; k < m && feasible; ++k) {
      long used = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (subset & (1ull << i)) used += inst.weights[k][i];
      feasible = used <= inst.capacities[k];
    }
    if (!feasible) continue;
    for (std::size_t i = 0; i < n; ++i)
      if (subset & (1ull << i)) value += inst.values[i];
    if (value > best.objective + kObjectiveEps) {
      best.objective = value;
      for (std::size_t i = 0; i < n; ++i) best.x[i] = (subset >> i) & 1;
    }
  }
  best.objective = selection_objective(inst.values, best.x);
  return best;
}

std::string to_json(const KnapsackInstance& inst) {
  nlohmann::json j{{"values", inst.values},
                   {"weights", inst.weights},
                   {"capacities", inst.capacities}};
  return j.dump(2);
}

}  // namespace rap
