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

#ifndef RAP_PRUNER_HPP_
#define RAP_PRUNER_HPP_

#include <string>
#include <vector>

#include "rap/hw.hpp"
#include "rap/knapsack.hpp"
#include "rap/nn.hpp"
#include "rap/structures.hpp"

namespace rap {

struct SparsityVector {
  double dsp = 0.0;
  double bram = 0.0;
};

struct IterationRecord {
  int iteration = 0;
  SparsityVector sparsity;
  ResourceVector capacities;
  ResourceVector used;
  double objective = 0.0;
  bool proven_optimal = true;
  std::size_t surviving_groups = 0;
  std::size_t newly_pruned = 0;
  double accuracy = 0.0;
  bool within_tolerance = true;
};

struct PruningState {
  SparsityVector sparsity;
  SparsityVector target;
  ResourceVector baseline;        // R_B
  double baseline_metric = 0.0;   // b
  double current_metric = 0.0;    // p
  double tolerance = 0.98;        // epsilon: keep while p >= epsilon * b
  Mask mask;
  std::vector<bool> group_pruned;  // per extracted group, in layer order
  std::vector<IterationRecord> history;
};

struct PruneOptions {
  SparsityVector target;
  double tolerance = 0.98;
  SparsityVector step{0.05, 0.05};  // constant sparsity increment
  int epochs_per_iteration = 10;
  std::size_t batch_size = 32;
  double lr = 1e-3;
  double lambda = 1e-4;
  double solver_time_limit = 10.0;
  std::uint64_t seed = 0;
};

// v_i = ||w_i||_2 normalized by the largest group norm in the same layer;
// layers whose surviving groups are all zero score 0.
std::vector<double> score_groups(std::vector<ResourceGroup>& groups,
                                 const Network& net);

// c = floor((1 - s) (.) R_B), componentwise.
ResourceVector capacities(const SparsityVector& sparsity,
                          const ResourceVector& baseline);

struct PruneStepReport {
  double objective = 0.0;
  bool proven_optimal = true;
  ResourceVector used;
  std::size_t newly_pruned = 0;
  std::size_t surviving = 0;
};

// One selection round: builds a knapsack instance over the surviving groups,
// solves it, and masks every weight of the unselected groups.
PruneStepReport prune_step(Network& net,
                           const std::vector<ResourceGroup>& groups,
                           PruningState& state, const ResourceVector& caps,
                           double time_limit);

struct PruningResult {
  Network net;             // last iterate within tolerance
  PruningState state;
  ResourceVector pruned_resources;      // group-sum of the surviving groups
  ResourceVector estimated_baseline;    // full per-layer estimator
  ResourceVector estimated_pruned;
  std::string report_json;  // per-iteration history + reduction factors
};

// Iterative magnitude pruning: score -> capacities -> knapsack -> mask ->
// fine-tune with group regularization -> evaluate -> advance sparsity.
PruningResult run_pruning(const Network& net, const Dataset& train,
                          const Dataset& val, const HardwareConfig& hwcfg,
                          const PruneOptions& opts);

std::string format_reduction(long baseline, long pruned);

}  // namespace rap

#endif  // RAP_PRUNER_HPP_
