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

#ifndef RAP_HW_HPP_
#define RAP_HW_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rap/nn.hpp"

namespace rap {

// BRAM word geometry: 1024 words x 36 bits.
inline constexpr int kBramWordBits = 36;
inline constexpr int kBramDepth = 1024;
// Multipliers below this precision are implemented in LUTs, not DSPs.
inline constexpr int kLutMultiplierThreshold = 10;

enum class Strategy { kLatency, kResource };
enum class Granularity { kUnstructured, kDspAware, kBramAware };

std::string strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);
std::string granularity_name(Granularity g);
Granularity granularity_from_name(const std::string& name);

struct ResourceVector {
  long dsp = 0;
  long bram = 0;

  ResourceVector& operator+=(const ResourceVector& other) {
    dsp += other.dsp;
    bram += other.bram;
    return *this;
  }
  friend ResourceVector operator+(ResourceVector a, const ResourceVector& b) {
    a += b;
    return a;
  }
  bool operator==(const ResourceVector&) const = default;
  // Componentwise partial order used by the capacity constraints.
  bool dominated_by(const ResourceVector& cap) const {
    return dsp <= cap.dsp && bram <= cap.bram;
  }
};

struct LayerHwConfig {
  int reuse_factor = 1;
  FixedPointFormat precision{16, 6};
  Strategy strategy = Strategy::kResource;
  Granularity granularity = Granularity::kDspAware;

  void validate() const;
};

struct HardwareConfig {
  LayerHwConfig defaults;
  std::map<std::string, LayerHwConfig> per_layer;

  LayerHwConfig for_layer(const std::string& name) const;
};

// Number of consecutive DSP groups sharing one BRAM word column: 36/P when P
// divides 36, else ceil(72/P).
int consecutive_groups(int total_bits);

// 0 below the LUT threshold, 1 otherwise.
int dsp_per_multiplier(int total_bits);

// Resource cost of one prunable structure under the given configuration.
ResourceVector group_resource(const LayerHwConfig& cfg);

// Unpruned per-layer estimate. Resource strategy: DSP = BF * dsp/mult with
// BF = ceil(n_weights / RF), BRAM = ceil(BF / C) * ceil(RF / 1024). Latency
// strategy: one multiplier per weight, no BRAM.
ResourceVector layer_baseline(const LayerSpec& layer, const LayerHwConfig& cfg);

ResourceVector network_baseline(const Network& net, const HardwareConfig& hwcfg);

// Post-pruning estimate: DSP counts multiplier instances with at least one
// alive weight; BRAM counts memory groups with at least one alive weight.
ResourceVector masked_layer_resources(const LayerSpec& layer,
                                      const LayerHwConfig& cfg,
                                      const std::vector<std::uint8_t>& mask);
ResourceVector masked_network_resources(const Network& net,
                                        const HardwareConfig& hwcfg,
                                        const Mask& mask);

HardwareConfig load_hwconfig(const std::string& path);
void save_hwconfig(const HardwareConfig& cfg, const std::string& path);

}  // namespace rap

#endif  // RAP_HW_HPP_
