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

#ifndef RAP_CODEGEN_HPP_
#define RAP_CODEGEN_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "rap/hw.hpp"
#include "rap/nn.hpp"

namespace rap {

struct ScheduleSlot {
  int cycle = 0;               // pipelined loop iteration
  std::size_t w_index = 0;     // transposed-flat weight index
  std::size_t in_index = 0;
  std::size_t out_index = 0;
  bool live = true;            // false when the owning structure is masked out
};

// Full index trace of one Resource-strategy layer: one multiplier instance
// per block-factor slot, RF cycles each (ragged final instance allowed).
struct LayerSchedule {
  std::string layer_name;
  std::size_t n_in = 0, n_out = 0;
  std::size_t bf = 0;
  int rf = 1;
  std::vector<std::vector<ScheduleSlot>> instances;

  std::size_t live_instance_count() const;
};

LayerSchedule build_schedule(const LayerSpec& layer, const LayerHwConfig& cfg,
                             const std::vector<std::uint8_t>& mask);

// Executes the schedule against the layer's (masked) weights; equals the
// dense kernel-matrix product when fully live.
std::vector<double> interpret(const LayerSchedule& schedule,
                              const LayerSpec& layer,
                              const std::vector<std::uint8_t>& mask,
                              const std::vector<double>& input);

// HLS-style source for one layer. Resource strategy: a pipelined loop over
// RF cycles with one multiply-accumulate statement per live instance; dead
// instances and their weights are omitted entirely. Latency strategy: a
// fully unrolled multiply list with per-weight elision.
std::string emit_source(const LayerSpec& layer, const LayerHwConfig& cfg,
                        const std::vector<std::uint8_t>& mask);

std::string schedule_to_json(const LayerSchedule& schedule);

// Writes layer_<name>.txt, schedule_<name>.json (Resource layers) and
// resources.json into outdir.
void generate_sources(const Network& net, const HardwareConfig& hwcfg,
                      const Mask& mask, const std::string& outdir);

}  // namespace rap

#endif  // RAP_CODEGEN_HPP_
