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

#include "rap/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "rap/codegen.hpp"
#include "rap/data_io.hpp"
#include "rap/errors.hpp"
#include "rap/hw.hpp"
#include "rap/structures.hpp"

namespace rap::cli {

namespace {

std::pair<Dataset, Dataset> split_dataset(const Dataset& all,
                                          double validation_fraction) {
  const std::size_t n = all.size();
  const std::size_t n_val =
      static_cast<std::size_t>(validation_fraction * static_cast<double>(n));
  const std::size_t n_train = n - n_val;
  if (n_train == 0 || n_val == 0)
    throw UsageError("dataset too small for the requested validation split");
  const std::size_t cols = all.features.size() / n;

  auto slice = [&](std::size_t begin, std::size_t end) {
    Dataset d;
    std::vector<std::size_t> shape = all.features.shape;
    shape[0] = end - begin;
    d.features = Tensor::zeros(shape);
    std::copy(all.features.data.begin() + begin * cols,
              all.features.data.begin() + end * cols,
              d.features.data.begin());
    d.labels.assign(all.labels.begin() + begin, all.labels.begin() + end);
    d.class_count = all.class_count;
    return d;
  };
  return {slice(0, n_train), slice(n_train, n)};
}

}  // namespace

std::pair<Dataset, Dataset> DataConfig::load() const {
  Dataset all;
  if (synthetic) {
    all = synth_classify(synth_seed, synth_samples, synth_features,
                         synth_classes, synth_separation);
  } else if (!csv_path.empty()) {
    all = load_csv(csv_path, label_column);
  } else if (!idx_images.empty()) {
    all = load_idx(idx_images, idx_labels);
  } else {
    throw UsageError("no dataset given: use --synthetic, --data or --idx-images");
  }
  return split_dataset(all, validation_fraction);
}

SparsityVector parse_target(const std::string& text) {
  SparsityVector target;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    const std::size_t eq = part.find('=');
    if (eq == std::string::npos)
      throw UsageError("bad sparsity target '" + part +
                       "', expected dim=value");
    const std::string dim = part.substr(0, eq);
    const double value = std::stod(part.substr(eq + 1));
    if (value < 0.0 || value > 1.0)
      throw UsageError("sparsity target must be in [0, 1]");
    if (dim == "dsp")
      target.dsp = value;
    else if (dim == "bram")
      target.bram = value;
    else
      throw UsageError("unknown sparsity dimension '" + dim + "'");
  }
  return target;
}

namespace {

Network build_mlp(const std::vector<std::size_t>& arch, std::uint64_t seed) {
  if (arch.size() < 2) throw UsageError("--arch needs at least two sizes");
  Network net;
  for (std::size_t i = 0; i + 1 < arch.size(); ++i) {
    net.layers.push_back(LayerSpec::dense(arch[i], arch[i + 1]));
    if (i + 2 < arch.size()) net.layers.push_back(LayerSpec::relu());
  }
  net.assign_names();
  init_weights(net, seed);
  return net;
}

void print_accuracy(std::ostream& out, const char* tag, double acc) {
  out << tag << " accuracy: " << std::fixed << std::setprecision(4) << acc
      << std::defaultfloat << "\n";
}

}  // namespace

int cmd_train(const RunConfig& cfg, std::ostream& out) {
  if (cfg.output_path.empty()) throw UsageError("train requires --out");
  auto [train, val] = cfg.data.load();
  Network net = build_mlp(cfg.arch, cfg.training.seed);
  fit(net, train, cfg.training);
  if (!net.layers.empty()) {
    Tensor probe = forward(net, val.features);
    if (!probe.all_finite()) throw NumericError("training diverged");
  }
  save_model(net, Mask::all_alive(net), cfg.output_path);
  print_accuracy(out, "train", evaluate(net, train));
  print_accuracy(out, "val", evaluate(net, val));
  out << "model written to " << cfg.output_path << "\n";
  return 0;
}

int cmd_prune(const RunConfig& cfg, std::ostream& out) {
  if (cfg.model_path.empty()) throw UsageError("prune requires --model");
  if (cfg.hwcfg_path.empty()) throw UsageError("prune requires --hwcfg");
  if (cfg.output_path.empty()) throw UsageError("prune requires --out");
  ModelFile mf = load_model(cfg.model_path);
  HardwareConfig hw = load_hwconfig(cfg.hwcfg_path);
  // Fail on inconsistent configuration before any training happens.
  network_baseline(mf.net, hw);
  auto [train, val] = cfg.data.load();

  PruningResult result = run_pruning(mf.net, train, val, hw, cfg.pruning);
  save_model(result.net, result.state.mask, cfg.output_path);
  if (!cfg.report_path.empty()) {
    std::ofstream rj(cfg.report_path);
    if (!rj) throw FormatError("cannot write report: " + cfg.report_path);
    rj << result.report_json << "\n";
  }

  const ResourceVector& base = result.estimated_baseline;
  const ResourceVector& pruned = result.estimated_pruned;
  out << "baseline: DSP " << base.dsp << ", BRAM " << base.bram << "\n";
  out << "pruned:   DSP " << pruned.dsp << " ("
      << format_reduction(base.dsp, pruned.dsp) << "), BRAM " << pruned.bram
      << " (" << format_reduction(base.bram, pruned.bram) << ")\n";
  print_accuracy(out, "baseline val", result.state.baseline_metric);
  print_accuracy(out, "pruned val", result.state.current_metric);
  out << "model written to " << cfg.output_path << "\n";
  return 0;
}

int cmd_estimate(const RunConfig& cfg, std::ostream& out) {
  if (cfg.model_path.empty()) throw UsageError("estimate requires --model");
  if (cfg.hwcfg_path.empty()) throw UsageError("estimate requires --hwcfg");
  ModelFile mf = load_model(cfg.model_path);
  HardwareConfig hw = load_hwconfig(cfg.hwcfg_path);

  ResourceVector base_total, masked_total;
  out << "layer            baseline(dsp,bram)  masked(dsp,bram)\n";
  for (std::size_t i = 0; i < mf.net.layers.size(); ++i) {
    const LayerSpec& layer = mf.net.layers[i];
    if (!layer.trainable()) continue;
    const LayerHwConfig lc = hw.for_layer(layer.name);
    const ResourceVector base = layer_baseline(layer, lc);
    const ResourceVector masked =
        masked_layer_resources(layer, lc, mf.mask.layers[i]);
    base_total += base;
    masked_total += masked;
    out << std::left << std::setw(16) << layer.name << " (" << base.dsp << ", "
        << base.bram << ")  (" << masked.dsp << ", " << masked.bram << ")\n";
  }
  out << "total: baseline DSP " << base_total.dsp << ", BRAM "
      << base_total.bram << "; masked DSP " << masked_total.dsp << ", BRAM "
      << masked_total.bram << "\n";
  return 0;
}

int cmd_codegen(const RunConfig& cfg, std::ostream& out) {
  if (cfg.model_path.empty()) throw UsageError("codegen requires --model");
  if (cfg.hwcfg_path.empty()) throw UsageError("codegen requires --hwcfg");
  if (cfg.outdir.empty()) throw UsageError("codegen requires --outdir");
  ModelFile mf = load_model(cfg.model_path);
  HardwareConfig hw = load_hwconfig(cfg.hwcfg_path);
  generate_sources(mf.net, hw, mf.mask, cfg.outdir);
  out << "sources written to " << cfg.outdir << "\n";
  return 0;
}

int cmd_eval(const RunConfig& cfg, std::ostream& out) {
  if (cfg.model_path.empty()) throw UsageError("eval requires --model");
  ModelFile mf = load_model(cfg.model_path);
  auto [train, val] = cfg.data.load();
  (void)train;
  print_accuracy(out, "val", evaluate(mf.net, val));
  if (cfg.quantized)
    print_accuracy(out, "val (quantized)",
                   evaluate(mf.net, val, cfg.quant_format));
  return 0;
}

}  // namespace rap::cli
