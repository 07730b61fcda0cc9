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

#include "rap/codegen.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rap/errors.hpp"
#include "rap/structures.hpp"

#include "json.hpp"

namespace rap {

namespace {

std::string fmt_double(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

bool weight_alive(const std::vector<std::uint8_t>& mask, std::size_t rowmajor) {
  return mask.empty() || mask[rowmajor] != 0;
}

// Per-multiplier liveness: a chunk is dead when every real weight it owns is
// masked. Unstructured layers track liveness per weight instead.
std::vector<std::uint8_t> chunk_liveness(const LayerSpec& layer,
                                         std::size_t rf,
                                         const std::vector<std::uint8_t>& mask) {
  const std::size_t n = layer.weight_count();
  const std::size_t n_in = layer.matrix_in(), n_out = layer.matrix_out();
  const std::size_t bf = (n + rf - 1) / rf;
  std::vector<std::uint8_t> live(bf, 0);
  for (std::size_t f = 0; f < n; ++f)
    if (weight_alive(mask, tflat_to_rowmajor(f, n_in, n_out))) live[f / rf] = 1;
  return live;
}

}  // namespace

std::size_t LayerSchedule::live_instance_count() const {
  std::size_t n = 0;
  for (const auto& inst : instances)
    for (const ScheduleSlot& slot : inst)
      if (slot.live) {
        ++n;
        break;
      }
  return n;
}

LayerSchedule build_schedule(const LayerSpec& layer, const LayerHwConfig& cfg,
                             const std::vector<std::uint8_t>& mask) {
  cfg.validate();
  if (cfg.strategy != Strategy::kResource)
    throw ConfigError("schedules describe Resource strategy layers only");
  if (!layer.trainable())
    throw ConfigError("cannot schedule a non-trainable layer");
  const std::size_t n = layer.weight_count();
  if (!mask.empty() && mask.size() != n)
    throw ConfigError("mask length mismatch for layer " + layer.name);
  if (cfg.reuse_factor > static_cast<long>(n))
    throw ConfigError("layer " + layer.name + ": reuse factor exceeds weights");

  const std::size_t rf = static_cast<std::size_t>(cfg.reuse_factor);
  const std::size_t n_in = layer.matrix_in(), n_out = layer.matrix_out();

  LayerSchedule sched;
  sched.layer_name = layer.name;
  sched.n_in = n_in;
  sched.n_out = n_out;
  sched.rf = cfg.reuse_factor;
  sched.bf = (n + rf - 1) / rf;
  sched.instances.resize(sched.bf);

  const std::vector<std::uint8_t> live = chunk_liveness(layer, rf, mask);

  // Instance j processes transposed-flat index j*RF + i in cycle i. The
  // input wraps at n_in and the accumulator advances every BF/n_out steps,
  // which for a flat index f lands on column f % n_in and row f / n_in.
  for (std::size_t j = 0; j < sched.bf; ++j) {
    for (std::size_t i = 0; i < rf; ++i) {
      const std::size_t f = j * rf + i;
      if (f >= n) break;  // padded slot of a ragged final block
      ScheduleSlot slot;
      slot.cycle = static_cast<int>(i);
      slot.w_index = f;
      slot.in_index = f % n_in;
      slot.out_index = f / n_in;
      slot.live = live[j] != 0;
      sched.instances[j].push_back(slot);
    }
  }
  return sched;
}

std::vector<double> interpret(const LayerSchedule& schedule,
                              const LayerSpec& layer,
                              const std::vector<std::uint8_t>& mask,
                              const std::vector<double>& input) {
  if (input.size() != schedule.n_in)
    throw ShapeError("interpret: input length mismatch");
  std::vector<double> tflat = transpose_flatten(layer);
  for (std::size_t f = 0; f < tflat.size(); ++f)
    if (!weight_alive(mask, tflat_to_rowmajor(f, schedule.n_in, schedule.n_out)))
      tflat[f] = 0.0;
  std::vector<double> out(schedule.n_out, 0.0);
  for (const auto& inst : schedule.instances)
    for (const ScheduleSlot& slot : inst)
      if (slot.live)
        out[slot.out_index] += tflat[slot.w_index] * input[slot.in_index];
  return out;
}

namespace {

std::string emit_resource_source(const LayerSpec& layer,
                                 const LayerHwConfig& cfg,
                                 const std::vector<std::uint8_t>& mask) {
  const LayerSchedule sched = build_schedule(layer, cfg, mask);
  const std::vector<double> tflat = transpose_flatten(layer);
  const std::size_t rf = static_cast<std::size_t>(sched.rf);

  std::ostringstream os;
  os << "// " << layer.name << ": resource strategy matrix multiply\n";
  os << "// n_in=" << sched.n_in << " n_out=" << sched.n_out
     << " RF=" << sched.rf << " BF=" << sched.bf << " precision=ap_fixed<"
     << cfg.precision.total_bits << "," << cfg.precision.integer_bits
     << ">\n";
  os << "// live multipliers: " << sched.live_instance_count() << " of "
     << sched.bf << "\n";
  os << "void " << layer.name << "(const input_t in[" << sched.n_in
     << "], result_t out[" << sched.n_out << "]) {\n";

  // Constant arrays for live instances only; weights of pruned instances
  // never appear. Masked weights inside a live instance become plain zeros.
  for (std::size_t j = 0; j < sched.bf; ++j) {
    const auto& inst = sched.instances[j];
    if (inst.empty() || !inst.front().live) continue;
    os << "  static const weight_t w" << j << "[" << rf << "] = {";
    for (std::size_t i = 0; i < rf; ++i) {
      if (i) os << ", ";
      if (i < inst.size()) {
        const std::size_t r = tflat_to_rowmajor(inst[i].w_index, sched.n_in,
                                                sched.n_out);
        const bool alive = weight_alive(mask, r);
        os << (alive ? fmt_double(tflat[inst[i].w_index]) : "0");
      } else {
        os << "0";  // zero-padded slot
      }
    }
    os << "};\n";
    os << "  static const int in_idx" << j << "[" << rf << "] = {";
    for (std::size_t i = 0; i < rf; ++i) {
      if (i) os << ", ";
      os << (i < inst.size() ? inst[i].in_index : 0);
    }
    os << "};\n";
    os << "  static const int out_idx" << j << "[" << rf << "] = {";
    for (std::size_t i = 0; i < rf; ++i) {
      if (i) os << ", ";
      os << (i < inst.size() ? inst[i].out_index : 0);
    }
    os << "};\n";
  }

  os << "  static const bias_t bias[" << sched.n_out << "] = {";
  for (std::size_t o = 0; o < sched.n_out; ++o) {
    if (o) os << ", ";
    os << fmt_double(layer.bias.data[o]);
  }
  os << "};\n";
  os << "  acc_t acc[" << sched.n_out << "];\n";
  os << "  INIT: for (int o = 0; o < " << sched.n_out
     << "; o++) acc[o] = bias[o];\n";
  os << "  CYCLE: for (int i = 0; i < " << rf << "; i++) {\n";
  os << "    #pragma HLS PIPELINE ii=1\n";
  for (std::size_t j = 0; j < sched.bf; ++j) {
    const auto& inst = sched.instances[j];
    if (inst.empty() || !inst.front().live) continue;
    os << "    acc[out_idx" << j << "[i]] += w" << j << "[i] * in[in_idx" << j
       << "[i]];  // UNROLL instance " << j << "\n";
  }
  os << "  }\n";
  os << "  WRITE: for (int o = 0; o < " << sched.n_out
     << "; o++) out[o] = acc[o];\n";
  os << "}\n";
  return os.str();
}

std::string emit_latency_source(const LayerSpec& layer,
                                const LayerHwConfig& cfg,
                                const std::vector<std::uint8_t>& mask) {
  const std::size_t n_in = layer.matrix_in(), n_out = layer.matrix_out();
  std::ostringstream os;
  os << "// " << layer.name << ": latency strategy, fully unrolled\n";
  os << "// n_in=" << n_in << " n_out=" << n_out << " precision=ap_fixed<"
     << cfg.precision.total_bits << "," << cfg.precision.integer_bits
     << ">\n";
  os << "void " << layer.name << "(const input_t in[" << n_in
     << "], result_t out[" << n_out << "]) {\n";
  os << "  #pragma HLS PIPELINE ii=1\n";
  os << "  static const bias_t bias[" << n_out << "] = {";
  for (std::size_t o = 0; o < n_out; ++o) {
    if (o) os << ", ";
    os << fmt_double(layer.bias.data[o]);
  }
  os << "};\n";
  os << "  acc_t acc[" << n_out << "];\n";
  os << "  INIT: for (int o = 0; o < " << n_out << "; o++) acc[o] = bias[o];\n";
  // One unrolled multiply per surviving weight; zeros are elided.
  for (std::size_t k = 0; k < n_in; ++k) {
    for (std::size_t o = 0; o < n_out; ++o) {
      const std::size_t r = k * n_out + o;
      if (!weight_alive(mask, r)) continue;
      os << "  acc[" << o << "] += " << fmt_double(layer.weights.data[r])
         << " * in[" << k << "];\n";
    }
  }
  os << "  WRITE: for (int o = 0; o < " << n_out
     << "; o++) out[o] = acc[o];\n";
  os << "}\n";
  return os.str();
}

}  // namespace

std::string emit_source(const LayerSpec& layer, const LayerHwConfig& cfg,
                        const std::vector<std::uint8_t>& mask) {
  cfg.validate();
  return cfg.strategy == Strategy::kResource
             ? emit_resource_source(layer, cfg, mask)
             : emit_latency_source(layer, cfg, mask);
}

std::string schedule_to_json(const LayerSchedule& schedule) {
  nlohmann::json j;
  j["layer"] = schedule.layer_name;
  j["n_in"] = schedule.n_in;
  j["n_out"] = schedule.n_out;
  j["rf"] = schedule.rf;
  j["bf"] = schedule.bf;
  nlohmann::json instances = nlohmann::json::array();
  for (const auto& inst : schedule.instances) {
    nlohmann::json slots = nlohmann::json::array();
    for (const ScheduleSlot& s : inst)
      slots.push_back({{"cycle", s.cycle},
                       {"w", s.w_index},
                       {"in", s.in_index},
                       {"out", s.out_index},
                       {"live", s.live}});
    instances.push_back(slots);
  }
  j["instances"] = instances;
  return j.dump(2);
}

void generate_sources(const Network& net, const HardwareConfig& hwcfg,
                      const Mask& mask, const std::string& outdir) {
  namespace fs = std::filesystem;
  fs::create_directories(outdir);
  static const std::vector<std::uint8_t> kEmpty;

  nlohmann::json report;
  nlohmann::json layers = nlohmann::json::array();
  ResourceVector base_total, pruned_total;

  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const LayerSpec& layer = net.layers[i];
    if (!layer.trainable()) continue;
    const LayerHwConfig cfg = hwcfg.for_layer(layer.name);
    const std::vector<std::uint8_t>& m =
        i < mask.layers.size() ? mask.layers[i] : kEmpty;

    std::ofstream src(fs::path(outdir) / ("layer_" + layer.name + ".txt"));
    src << emit_source(layer, cfg, m);

    ResourceVector base = layer_baseline(layer, cfg);
    ResourceVector pruned = masked_layer_resources(layer, cfg, m);
    base_total += base;
    pruned_total += pruned;

    nlohmann::json lj{{"name", layer.name},
                      {"strategy", strategy_name(cfg.strategy)},
                      {"baseline", {{"dsp", base.dsp}, {"bram", base.bram}}},
                      {"pruned", {{"dsp", pruned.dsp}, {"bram", pruned.bram}}}};
    if (cfg.strategy == Strategy::kResource) {
      const LayerSchedule sched = build_schedule(layer, cfg, m);
      lj["live_instances"] = sched.live_instance_count();
      std::ofstream sj(fs::path(outdir) / ("schedule_" + layer.name + ".json"));
      sj << schedule_to_json(sched) << "\n";
    }
    layers.push_back(lj);
  }
  report["layers"] = layers;
  report["total"] = {
      {"baseline", {{"dsp", base_total.dsp}, {"bram", base_total.bram}}},
      {"pruned", {{"dsp", pruned_total.dsp}, {"bram", pruned_total.bram}}}};
  std::ofstream rj(fs::path(outdir) / "resources.json");
  rj << report.dump(2) << "\n";
}

}  // namespace rap
