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

#include "rap/hw.hpp"

#include <fstream>

#include "rap/errors.hpp"
#include "rap/structures.hpp"

#include "json.hpp"

namespace rap {

namespace {

long ceil_div(long a, long b) { return (a + b - 1) / b; }

}  // namespace

std::string strategy_name(Strategy s) {
  return s == Strategy::kLatency ? "Latency" : "Resource";
}

Strategy strategy_from_name(const std::string& name) {
  if (name == "Latency" || name == "latency") return Strategy::kLatency;
  if (name == "Resource" || name == "resource") return Strategy::kResource;
  throw ConfigError("unknown strategy: " + name);
}

std::string granularity_name(Granularity g) {
  switch (g) {
    case Granularity::kUnstructured: return "unstructured";
    case Granularity::kDspAware: return "dsp_aware";
    case Granularity::kBramAware: return "bram_aware";
  }
  return "unknown";
}

Granularity granularity_from_name(const std::string& name) {
  if (name == "unstructured") return Granularity::kUnstructured;
  if (name == "dsp_aware") return Granularity::kDspAware;
  if (name == "bram_aware") return Granularity::kBramAware;
  throw ConfigError("unknown granularity: " + name);
}

void LayerHwConfig::validate() const {
  if (reuse_factor < 1) throw ConfigError("reuse factor must be positive");
  precision.validate();
  if (strategy == Strategy::kLatency &&
      granularity != Granularity::kUnstructured)
    throw ConfigError(
        "Latency strategy maps each weight to its own multiplier; only "
        "unstructured granularity is valid");
  if (strategy == Strategy::kResource &&
      granularity == Granularity::kUnstructured)
    throw ConfigError(
        "Resource strategy requires dsp_aware or bram_aware granularity");
}

LayerHwConfig HardwareConfig::for_layer(const std::string& name) const {
  auto it = per_layer.find(name);
  return it == per_layer.end() ? defaults : it->second;
}

int consecutive_groups(int total_bits) {
  if (total_bits < 2 || total_bits > kBramWordBits)
    throw ConfigError("precision must be in [2, 36] bits");
  if (kBramWordBits % total_bits == 0) return kBramWordBits / total_bits;
  return static_cast<int>(ceil_div(2 * kBramWordBits, total_bits));
}

int dsp_per_multiplier(int total_bits) {
  return total_bits < kLutMultiplierThreshold ? 0 : 1;
}

ResourceVector group_resource(const LayerHwConfig& cfg) {
  cfg.validate();
  const int dsp = dsp_per_multiplier(cfg.precision.total_bits);
  switch (cfg.granularity) {
    case Granularity::kUnstructured:
    case Granularity::kDspAware:
      return {dsp, 0};
    case Granularity::kBramAware:
      return {consecutive_groups(cfg.precision.total_bits) * dsp, 1};
  }
  return {};
}

ResourceVector layer_baseline(const LayerSpec& layer,
                              const LayerHwConfig& cfg) {
  cfg.validate();
  if (!layer.trainable())
    throw ConfigError("layer " + layer.name + " has no weights to map");
  const long n_weights = static_cast<long>(layer.weight_count());
  const int dsp_mult = dsp_per_multiplier(cfg.precision.total_bits);
  if (cfg.strategy == Strategy::kLatency)
    return {n_weights * dsp_mult, 0};
  if (cfg.reuse_factor > n_weights)
    throw ConfigError("layer " + layer.name + ": reuse factor " +
                      std::to_string(cfg.reuse_factor) + " exceeds " +
                      std::to_string(n_weights) + " weights");
  const long bf = ceil_div(n_weights, cfg.reuse_factor);
  const long c = consecutive_groups(cfg.precision.total_bits);
  const long bram = ceil_div(bf, c) * ceil_div(cfg.reuse_factor, kBramDepth);
  return {bf * dsp_mult, bram};
}

ResourceVector network_baseline(const Network& net,
                                const HardwareConfig& hwcfg) {
  ResourceVector total;
  for (const LayerSpec& layer : net.layers)
    if (layer.trainable())
      total += layer_baseline(layer, hwcfg.for_layer(layer.name));
  return total;
}

ResourceVector masked_layer_resources(const LayerSpec& layer,
                                      const LayerHwConfig& cfg,
                                      const std::vector<std::uint8_t>& mask) {
  cfg.validate();
  const std::size_t n_weights = layer.weight_count();
  if (!mask.empty() && mask.size() != n_weights)
    throw ConfigError("mask length mismatch for layer " + layer.name);
  const int dsp_mult = dsp_per_multiplier(cfg.precision.total_bits);
  auto alive = [&](std::size_t rowmajor) {
    return mask.empty() || mask[rowmajor] != 0;
  };

  if (cfg.strategy == Strategy::kLatency) {
    long live = 0;
    for (std::size_t i = 0; i < n_weights; ++i)
      if (alive(i)) ++live;
    return {live * dsp_mult, 0};
  }

  const std::size_t rf = static_cast<std::size_t>(cfg.reuse_factor);
  const std::size_t n_in = layer.matrix_in(), n_out = layer.matrix_out();
  const std::size_t bf = (n_weights + rf - 1) / rf;
  const long c = consecutive_groups(cfg.precision.total_bits);

  // A multiplier survives while any of its weights is alive; a memory group
  // survives while any of its C multipliers does.
  std::vector<std::uint8_t> chunk_live(bf, 0);
  for (std::size_t f = 0; f < n_weights; ++f)
    if (alive(tflat_to_rowmajor(f, n_in, n_out))) chunk_live[f / rf] = 1;

  long live_chunks = 0;
  for (std::uint8_t b : chunk_live) live_chunks += b;
  long live_bram_groups = 0;
  for (std::size_t g = 0; g * c < bf; ++g) {
    bool any = false;
    for (std::size_t j = g * c; j < std::min<std::size_t>((g + 1) * c, bf);
         ++j)
      any = any || chunk_live[j];
    if (any) ++live_bram_groups;
  }
  const long words = ceil_div(cfg.reuse_factor, kBramDepth);
  return {live_chunks * dsp_mult, live_bram_groups * words};
}

ResourceVector masked_network_resources(const Network& net,
                                        const HardwareConfig& hwcfg,
                                        const Mask& mask) {
  ResourceVector total;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const LayerSpec& layer = net.layers[i];
    if (!layer.trainable()) continue;
    static const std::vector<std::uint8_t> kEmpty;
    const std::vector<std::uint8_t>& m =
        i < mask.layers.size() ? mask.layers[i] : kEmpty;
    total += masked_layer_resources(layer, hwcfg.for_layer(layer.name), m);
  }
  return total;
}

namespace {

using nlohmann::json;

LayerHwConfig parse_layer_cfg(const json& j, const LayerHwConfig& base) {
  LayerHwConfig cfg = base;
  if (j.contains("reuse_factor")) cfg.reuse_factor = j.at("reuse_factor");
  if (j.contains("precision")) {
    cfg.precision.total_bits = j.at("precision").at("total");
    cfg.precision.integer_bits = j.at("precision").at("integer");
  }
  if (j.contains("strategy"))
    cfg.strategy = strategy_from_name(j.at("strategy"));
  if (j.contains("granularity"))
    cfg.granularity = granularity_from_name(j.at("granularity"));
  cfg.validate();
  return cfg;
}

json layer_cfg_to_json(const LayerHwConfig& cfg) {
  return json{{"reuse_factor", cfg.reuse_factor},
              {"precision",
               {{"total", cfg.precision.total_bits},
                {"integer", cfg.precision.integer_bits}}},
              {"strategy", strategy_name(cfg.strategy)},
              {"granularity", granularity_name(cfg.granularity)}};
}

}  // namespace

HardwareConfig load_hwconfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open hardware config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError("invalid hardware config JSON: " + std::string(e.what()));
  }
  HardwareConfig cfg;
  try {
    if (j.contains("defaults"))
      cfg.defaults = parse_layer_cfg(j.at("defaults"), LayerHwConfig{});
    if (j.contains("layers"))
      for (const json& lj : j.at("layers"))
        cfg.per_layer[lj.at("name")] = parse_layer_cfg(lj, cfg.defaults);
  } catch (const json::exception& e) {
    throw FormatError("invalid hardware config: " + std::string(e.what()));
  }
  return cfg;
}

void save_hwconfig(const HardwareConfig& cfg, const std::string& path) {
  json j;
  j["defaults"] = layer_cfg_to_json(cfg.defaults);
  j["layers"] = json::array();
  for (const auto& [name, lc] : cfg.per_layer) {
    json lj = layer_cfg_to_json(lc);
    lj["name"] = name;
    j["layers"].push_back(lj);
  }
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write hardware config: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace rap
