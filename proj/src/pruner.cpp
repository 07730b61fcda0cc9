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

#include "rap/pruner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "rap/errors.hpp"

#include "json.hpp"

namespace rap {

std::vector<double> score_groups(std::vector<ResourceGroup>& groups,
                                 const Network& net) {
  std::map<std::size_t, double> layer_max;
  for (ResourceGroup& g : groups) {
    g.norm = group_norm(g, net);
    double& mx = layer_max[g.layer_id];
    mx = std::max(mx, g.norm);
  }
  std::vector<double> values;
  values.reserve(groups.size());
  for (const ResourceGroup& g : groups) {
    const double mx = layer_max[g.layer_id];
    values.push_back(mx > 0.0 ? g.norm / mx : 0.0);
  }
  return values;
}

ResourceVector capacities(const SparsityVector& sparsity,
                          const ResourceVector& baseline) {
  return {static_cast<long>(std::floor((1.0 - sparsity.dsp) *
                                       static_cast<double>(baseline.dsp))),
          static_cast<long>(std::floor((1.0 - sparsity.bram) *
                                       static_cast<double>(baseline.bram)))};
}

PruneStepReport prune_step(Network& net,
                           const std::vector<ResourceGroup>& groups,
                           PruningState& state, const ResourceVector& caps,
                           double time_limit) {
  if (caps.dsp < 0 || caps.bram < 0)
    throw ConfigError("infeasible capacity: negative component");
  if (state.group_pruned.size() != groups.size())
    state.group_pruned.assign(groups.size(), false);

  // Already-pruned groups are dropped from the instance; their coordinates
  // stay masked.
  std::vector<std::size_t> survivors;
  for (std::size_t i = 0; i < groups.size(); ++i)
    if (!state.group_pruned[i]) survivors.push_back(i);

  std::vector<ResourceGroup> surviving_groups;
  surviving_groups.reserve(survivors.size());
  for (std::size_t i : survivors) surviving_groups.push_back(groups[i]);
  std::vector<double> values = score_groups(surviving_groups, net);

  KnapsackInstance inst;
  inst.values = values;
  inst.weights.assign(2, std::vector<long>(survivors.size(), 0));
  inst.capacities = {caps.dsp, caps.bram};
  for (std::size_t i = 0; i < survivors.size(); ++i) {
    inst.weights[0][i] = groups[survivors[i]].resource.dsp;
    inst.weights[1][i] = groups[survivors[i]].resource.bram;
  }

  Selection sel = solve_mdkp(inst, time_limit);

  PruneStepReport report;
  report.objective = sel.objective;
  report.proven_optimal = sel.proven_optimal;
  for (std::size_t i = 0; i < survivors.size(); ++i) {
    const ResourceGroup& g = groups[survivors[i]];
    if (sel.x[i]) {
      report.used += g.resource;
      ++report.surviving;
      continue;
    }
    state.group_pruned[survivors[i]] = true;
    ++report.newly_pruned;
    const LayerSpec& layer = net.layers[g.layer_id];
    for (std::size_t f : g.coords) {
      const std::size_t r =
          tflat_to_rowmajor(f, layer.matrix_in(), layer.matrix_out());
      state.mask.layers[g.layer_id][r] = 0;
      net.layers[g.layer_id].weights.data[r] = 0.0;
    }
  }
  return report;
}

std::string format_reduction(long baseline, long pruned) {
  char buf[32];
  const double factor = pruned > 0 ? static_cast<double>(baseline) /
                                         static_cast<double>(pruned)
                                   : 0.0;
  if (pruned > 0)
    std::snprintf(buf, sizeof(buf), "%.1fx", factor);
  else
    std::snprintf(buf, sizeof(buf), "inf");
  return buf;
}

namespace {

nlohmann::json history_json(const PruningState& state,
                            const ResourceVector& pruned,
                            const ResourceVector& est_base,
                            const ResourceVector& est_pruned) {
  nlohmann::json j;
  // "baseline"/"pruned" are the full per-layer estimates; the knapsack
  // constraint space (group sums) is recorded separately.
  j["baseline"] = {{"dsp", est_base.dsp}, {"bram", est_base.bram}};
  j["pruned"] = {{"dsp", est_pruned.dsp}, {"bram", est_pruned.bram}};
  j["reduction_factors"] = {
      {"dsp", format_reduction(est_base.dsp, est_pruned.dsp)},
      {"bram", format_reduction(est_base.bram, est_pruned.bram)}};
  j["group_baseline"] = {{"dsp", state.baseline.dsp},
                         {"bram", state.baseline.bram}};
  j["group_pruned"] = {{"dsp", pruned.dsp}, {"bram", pruned.bram}};
  j["baseline_accuracy"] = state.baseline_metric;
  j["final_accuracy"] = state.current_metric;
  j["tolerance"] = state.tolerance;
  nlohmann::json iters = nlohmann::json::array();
  for (const IterationRecord& r : state.history) {
    iters.push_back(
        {{"iteration", r.iteration},
         {"sparsity", {{"dsp", r.sparsity.dsp}, {"bram", r.sparsity.bram}}},
         {"capacities", {{"dsp", r.capacities.dsp}, {"bram", r.capacities.bram}}},
         {"used", {{"dsp", r.used.dsp}, {"bram", r.used.bram}}},
         {"objective", r.objective},
         {"proven_optimal", r.proven_optimal},
         {"surviving_groups", r.surviving_groups},
         {"newly_pruned", r.newly_pruned},
         {"accuracy", r.accuracy},
         {"within_tolerance", r.within_tolerance}});
  }
  j["iterations"] = iters;
  return j;
}

bool any_below_target(const SparsityVector& s, const SparsityVector& target) {
  return s.dsp < target.dsp || s.bram < target.bram;
}

SparsityVector advance(const SparsityVector& s, const SparsityVector& step,
                       const SparsityVector& target) {
  // Constant increment, clamped to the target so the final round solves at
  // exactly the requested sparsity.
  SparsityVector next;
  next.dsp = s.dsp < target.dsp ? std::min(s.dsp + step.dsp, target.dsp) : s.dsp;
  next.bram =
      s.bram < target.bram ? std::min(s.bram + step.bram, target.bram) : s.bram;
  return next;
}

}  // namespace

PruningResult run_pruning(const Network& net, const Dataset& train,
                          const Dataset& val, const HardwareConfig& hwcfg,
                          const PruneOptions& opts) {
  if (opts.tolerance <= 0.0 || opts.tolerance > 1.0)
    throw ConfigError("tolerance must be in (0, 1]");
  if (opts.target.dsp < 0.0 || opts.target.dsp > 1.0 ||
      opts.target.bram < 0.0 || opts.target.bram > 1.0)
    throw ConfigError("target sparsity components must be in [0, 1]");

  Network current = net;
  current.assign_names();
  current.validate();

  std::vector<ResourceGroup> groups = extract_network_groups(current, hwcfg);
  std::vector<GroupRef> refs = to_group_refs(groups, current);

  PruningState state;
  state.target = opts.target;
  state.tolerance = opts.tolerance;
  state.mask = Mask::all_alive(current);
  state.group_pruned.assign(groups.size(), false);
  for (const ResourceGroup& g : groups) state.baseline += g.resource;

  // state.baseline sums group costs, which span only the dimensions the
  // chosen granularity models (DSP for dsp_aware, DSP and BRAM for
  // bram_aware). The report also carries the full per-layer estimate.
  state.baseline_metric = evaluate(current, val);
  state.current_metric = state.baseline_metric;

  PruningResult result;
  result.net = current;
  result.state = state;

  SparsityVector s;  // starts at zero
  int iteration = 0;
  Network best = current;
  Mask best_mask = state.mask;
  ResourceVector best_used = state.baseline;
  bool target_reached = !any_below_target(s, opts.target);

  while (!target_reached &&
         state.current_metric >= opts.tolerance * state.baseline_metric) {
    s = advance(s, opts.step, opts.target);
    ++iteration;
    const ResourceVector caps = capacities(s, state.baseline);
    PruneStepReport step =
        prune_step(current, groups, state, caps, opts.solver_time_limit);

    if (step.newly_pruned > 0) {
      // Fine-tune surviving weights with group regularization; masked
      // coordinates receive zero gradient and never regrow.
      std::vector<GroupRef> surviving_refs;
      for (std::size_t i = 0; i < groups.size(); ++i)
        if (!state.group_pruned[i]) surviving_refs.push_back(refs[i]);
      TrainConfig ft;
      ft.epochs = opts.epochs_per_iteration;
      ft.batch_size = opts.batch_size;
      ft.lr = opts.lr;
      ft.lambda = opts.lambda;
      ft.seed = opts.seed + static_cast<std::uint64_t>(iteration);
      fit(current, train, ft, surviving_refs, &state.mask);
    }

    state.current_metric = evaluate(current, val);
    const bool ok =
        state.current_metric >= opts.tolerance * state.baseline_metric;

    IterationRecord rec;
    rec.iteration = iteration;
    rec.sparsity = s;
    rec.capacities = caps;
    rec.used = step.used;
    rec.objective = step.objective;
    rec.proven_optimal = step.proven_optimal;
    rec.surviving_groups = step.surviving;
    rec.newly_pruned = step.newly_pruned;
    rec.accuracy = state.current_metric;
    rec.within_tolerance = ok;
    state.history.push_back(rec);

    if (ok) {
      best = current;
      best_mask = state.mask;
      best_used = step.used;
    }
    target_reached = !any_below_target(s, opts.target);
  }

  state.sparsity = s;
  result.net = best;
  result.state = state;
  result.state.mask = best_mask;
  result.pruned_resources = best_used;
  result.estimated_baseline = network_baseline(current, hwcfg);
  result.estimated_pruned = masked_network_resources(best, hwcfg, best_mask);
  result.report_json = history_json(result.state, best_used,
                                    result.estimated_baseline,
                                    result.estimated_pruned)
                           .dump(2);
  return result;
}

}  // namespace rap
