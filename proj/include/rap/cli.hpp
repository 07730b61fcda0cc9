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

#ifndef RAP_CLI_HPP_
#define RAP_CLI_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rap/nn.hpp"
#include "rap/pruner.hpp"

namespace rap::cli {

struct DataConfig {
  std::string csv_path;
  std::string label_column = "label";
  std::string idx_images, idx_labels;
  bool synthetic = false;
  std::uint64_t synth_seed = 7;
  std::size_t synth_samples = 4000;
  std::size_t synth_features = 16;
  int synth_classes = 5;
  double synth_separation = 2.0;
  double validation_fraction = 0.2;

  // (train, validation) split; deterministic.
  std::pair<Dataset, Dataset> load() const;
};

struct RunConfig {
  DataConfig data;
  std::string model_path;
  std::string hwcfg_path;
  std::string output_path;
  std::string report_path;
  std::string outdir;
  std::vector<std::size_t> arch = {16, 64, 32, 32, 5};
  TrainConfig training;
  PruneOptions pruning;
  bool quantized = false;
  FixedPointFormat quant_format{16, 6};
};

// Sparsity targets as "dsp=0.5,bram=0.25"; omitted dimensions stay 0.
SparsityVector parse_target(const std::string& text);

int cmd_train(const RunConfig& cfg, std::ostream& out);
int cmd_prune(const RunConfig& cfg, std::ostream& out);
int cmd_estimate(const RunConfig& cfg, std::ostream& out);
int cmd_codegen(const RunConfig& cfg, std::ostream& out);
int cmd_eval(const RunConfig& cfg, std::ostream& out);

}  // namespace rap::cli

#endif  // RAP_CLI_HPP_
