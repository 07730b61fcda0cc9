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

#include <iostream>
#include <string>

#include "rap/cli.hpp"
#include "rap/errors.hpp"

#include "CLI11.hpp"

namespace {

void add_data_flags(CLI::App* cmd, rap::cli::DataConfig* data) {
  cmd->add_option("--data", data->csv_path, "CSV dataset path");
  cmd->add_option("--label-col", data->label_column, "CSV label column name");
  cmd->add_option("--idx-images", data->idx_images, "IDX image file");
  cmd->add_option("--idx-labels", data->idx_labels, "IDX label file");
  cmd->add_flag("--synthetic", data->synthetic, "use the synthetic task");
  cmd->add_option("--synth-seed", data->synth_seed, "synthetic dataset seed");
  cmd->add_option("--synth-samples", data->synth_samples,
                  "synthetic sample count");
  cmd->add_option("--synth-features", data->synth_features,
                  "synthetic feature count");
  cmd->add_option("--synth-classes", data->synth_classes,
                  "synthetic class count");
  cmd->add_option("--synth-separation", data->synth_separation,
                  "synthetic class separation");
  cmd->add_option("--val-fraction", data->validation_fraction,
                  "validation split fraction");
}

std::vector<std::size_t> parse_arch(const std::string& text) {
  std::vector<std::size_t> arch;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    arch.push_back(std::stoul(text.substr(pos, next - pos)));
    pos = next + 1;
  }
  return arch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resource-aware structured pruning toolkit"};
  app.require_subcommand(1);

  rap::cli::RunConfig cfg;
  std::string target_text, arch_text, quant_text;

  CLI::App* train = app.add_subcommand("train", "train a dense network");
  add_data_flags(train, &cfg.data);
  train->add_option("--arch", arch_text, "layer sizes, e.g. 16,64,32,32,5");
  train->add_option("--epochs", cfg.training.epochs, "training epochs");
  train->add_option("--batch", cfg.training.batch_size, "batch size");
  train->add_option("--lr", cfg.training.lr, "learning rate");
  train->add_option("--lambda", cfg.training.lambda, "regularization weight");
  train->add_option("--seed", cfg.training.seed, "weight init / shuffle seed");
  train->add_option("--out", cfg.output_path, "output model path")->required();

  CLI::App* prune = app.add_subcommand("prune", "resource-aware pruning");
  add_data_flags(prune, &cfg.data);
  prune->add_option("--model", cfg.model_path, "pre-trained model")->required();
  prune->add_option("--hwcfg", cfg.hwcfg_path, "hardware config JSON")
      ->required();
  prune->add_option("--target", target_text,
                    "sparsity target, e.g. dsp=0.5,bram=0.25");
  prune->add_option("--eps", cfg.pruning.tolerance,
                    "relative accuracy tolerance in (0,1]");
  prune->add_option("--delta", cfg.pruning.step.dsp,
                    "sparsity increment per iteration");
  prune->add_option("--epochs-per-iter", cfg.pruning.epochs_per_iteration,
                    "fine-tune epochs per iteration");
  prune->add_option("--batch", cfg.pruning.batch_size, "batch size");
  prune->add_option("--lr", cfg.pruning.lr, "fine-tune learning rate");
  prune->add_option("--lambda", cfg.pruning.lambda, "group regularization");
  prune->add_option("--time-limit", cfg.pruning.solver_time_limit,
                    "solver time limit per iteration [s]");
  prune->add_option("--seed", cfg.pruning.seed, "fine-tune shuffle seed");
  prune->add_option("--out", cfg.output_path, "pruned model path")->required();
  prune->add_option("--report", cfg.report_path, "iteration report JSON");

  CLI::App* estimate = app.add_subcommand("estimate", "resource estimates");
  estimate->add_option("--model", cfg.model_path, "model path")->required();
  estimate->add_option("--hwcfg", cfg.hwcfg_path, "hardware config JSON")
      ->required();

  CLI::App* codegen = app.add_subcommand("codegen", "emit HLS-style sources");
  codegen->add_option("--model", cfg.model_path, "model path")->required();
  codegen->add_option("--hwcfg", cfg.hwcfg_path, "hardware config JSON")
      ->required();
  codegen->add_option("--outdir", cfg.outdir, "output directory")->required();

  CLI::App* eval = app.add_subcommand("eval", "evaluate accuracy");
  add_data_flags(eval, &cfg.data);
  eval->add_option("--model", cfg.model_path, "model path")->required();
  eval->add_option("--quantized", quant_text,
                   "fixed-point eval as total,integer bits, e.g. 18,6");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (!arch_text.empty()) cfg.arch = parse_arch(arch_text);
    if (!target_text.empty()) cfg.pruning.target = rap::cli::parse_target(target_text);
    cfg.pruning.step.bram = cfg.pruning.step.dsp;
    if (!quant_text.empty()) {
      const std::size_t comma = quant_text.find(',');
      if (comma == std::string::npos)
        throw rap::UsageError("--quantized expects total,integer bits");
      cfg.quantized = true;
      cfg.quant_format.total_bits = std::stoi(quant_text.substr(0, comma));
      cfg.quant_format.integer_bits = std::stoi(quant_text.substr(comma + 1));
      cfg.quant_format.validate();
    }

    if (train->parsed()) return rap::cli::cmd_train(cfg, std::cout);
    if (prune->parsed()) return rap::cli::cmd_prune(cfg, std::cout);
    if (estimate->parsed()) return rap::cli::cmd_estimate(cfg, std::cout);
    if (codegen->parsed()) return rap::cli::cmd_codegen(cfg, std::cout);
    if (eval->parsed()) return rap::cli::cmd_eval(cfg, std::cout);
  } catch (const rap::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const rap::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const rap::FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return 2;
  } catch (const rap::ShapeError& e) {
    std::cerr << "shape error: " << e.what() << "\n";
    return 2;
  } catch (const rap::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
