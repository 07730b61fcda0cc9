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

#include "rap/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>

#include "rap/errors.hpp"

#include "json.hpp"

namespace rap {

Dataset synth_classify(std::uint64_t seed, std::size_t n_samples,
                       std::size_t n_features, int n_classes,
                       double separation) {
  if (n_classes < 2) throw UsageError("synthetic task needs >= 2 classes");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<std::vector<double>> means(n_classes,
                                         std::vector<double>(n_features));
  for (auto& mean : means)
    for (double& x : mean) x = separation * normal(rng);

  Dataset data;
  data.class_count = n_classes;
  data.features = Tensor::zeros({n_samples, n_features});
  data.labels.resize(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const int cls = static_cast<int>(i % static_cast<std::size_t>(n_classes));
    data.labels[i] = cls;
    for (std::size_t f = 0; f < n_features; ++f)
      data.features.data[i * n_features + f] =
          means[cls][f] + normal(rng);
  }
  return data;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_number(const std::string& text, std::size_t line_no) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r'))
    --end;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    throw FormatError("line " + std::to_string(line_no) +
                      ": non-numeric cell '" + text + "'");
  return value;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open CSV: " + path);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty CSV: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header = split_csv_line(line);
  std::size_t label_idx = header.size();
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == label_column) label_idx = i;
  if (label_idx == header.size())
    throw FormatError("label column '" + label_column + "' not in header");

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw FormatError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " cells, got " +
                        std::to_string(cells.size()));
    std::vector<double> row;
    row.reserve(header.size() - 1);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const double v = parse_number(cells[i], line_no);
      if (i == label_idx)
        labels.push_back(static_cast<int>(v));
      else
        row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError("CSV has no data rows: " + path);

  Dataset data;
  const std::size_t n_features = rows[0].size();
  data.features = Tensor::zeros({rows.size(), n_features});
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy(rows[i].begin(), rows[i].end(),
              data.features.data.begin() + i * n_features);
  data.labels = std::move(labels);
  int max_label = 0;
  for (int l : data.labels) {
    if (l < 0) throw FormatError("negative class label in " + path);
    max_label = std::max(max_label, l);
  }
  data.class_count = max_label + 1;
  return data;
}

void save_csv(const Dataset& data, const std::string& path,
              const std::string& label_column) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write CSV: " + path);
  const std::size_t n = data.size();
  const std::size_t f = n == 0 ? 0 : data.features.size() / n;
  for (std::size_t i = 0; i < f; ++i) out << "f" << i << ",";
  out << label_column << "\n";
  char buf[32];
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < f; ++i) {
      auto [ptr, ec] =
          std::to_chars(buf, buf + sizeof(buf), data.features.data[r * f + i]);
      out.write(buf, ptr - buf);
      out << ",";
    }
    out << data.labels[r] << "\n";
  }
}

namespace {

std::uint32_t read_be32(std::istream& in, const std::string& path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw FormatError("truncated IDX file: " + path);
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

}  // namespace

Dataset load_idx(const std::string& images_path,
                 const std::string& labels_path) {
  std::ifstream img(images_path, std::ios::binary);
  if (!img) throw FormatError("cannot open IDX images: " + images_path);
  if (read_be32(img, images_path) != 0x00000803u)
    throw FormatError("bad IDX image magic in " + images_path);
  const std::uint32_t n = read_be32(img, images_path);
  const std::uint32_t h = read_be32(img, images_path);
  const std::uint32_t w = read_be32(img, images_path);

  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab) throw FormatError("cannot open IDX labels: " + labels_path);
  if (read_be32(lab, labels_path) != 0x00000801u)
    throw FormatError("bad IDX label magic in " + labels_path);
  if (read_be32(lab, labels_path) != n)
    throw FormatError("IDX image/label count mismatch");

  Dataset data;
  data.features = Tensor::zeros({n, h, w, 1});
  data.labels.resize(n);
  std::vector<unsigned char> pixels(static_cast<std::size_t>(n) * h * w);
  if (!img.read(reinterpret_cast<char*>(pixels.data()),
                static_cast<std::streamsize>(pixels.size())))
    throw FormatError("truncated IDX image data: " + images_path);
  for (std::size_t i = 0; i < pixels.size(); ++i)
    data.features.data[i] = pixels[i] / 255.0;

  std::vector<unsigned char> raw_labels(n);
  if (!lab.read(reinterpret_cast<char*>(raw_labels.data()), n))
    throw FormatError("truncated IDX label data: " + labels_path);
  int max_label = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    data.labels[i] = raw_labels[i];
    max_label = std::max(max_label, data.labels[i]);
  }
  data.class_count = max_label + 1;
  return data;
}

namespace {

using nlohmann::json;

json layer_to_json(const LayerSpec& l) {
  json j;
  j["kind"] = layer_kind_name(l.kind);
  switch (l.kind) {
    case LayerKind::kDense:
      j["shape"] = json::array({l.n_in, l.n_out});
      break;
    case LayerKind::kConv2d:
      j["shape"] = json::array({l.kh, l.kw, l.c_in, l.c_out});
      break;
    default:
      j["shape"] = json::array();
      break;
  }
  j["weights"] = l.weights.data;
  j["bias"] = l.bias.data;
  return j;
}

LayerSpec layer_from_json(const json& j) {
  const LayerKind kind = layer_kind_from_name(j.at("kind"));
  const std::vector<std::size_t> shape = j.at("shape");
  LayerSpec l;
  switch (kind) {
    case LayerKind::kDense:
      if (shape.size() != 2) throw FormatError("dense layer needs shape [n_in, n_out]");
      l = LayerSpec::dense(shape[0], shape[1]);
      break;
    case LayerKind::kConv2d:
      if (shape.size() != 4)
        throw FormatError("conv2d layer needs shape [kh, kw, c_in, c_out]");
      l = LayerSpec::conv2d(shape[0], shape[1], shape[2], shape[3]);
      break;
    case LayerKind::kRelu:
      l = LayerSpec::relu();
      break;
    case LayerKind::kSoftmax:
      l = LayerSpec::softmax();
      break;
  }
  if (l.trainable()) {
    const std::vector<double> w = j.at("weights");
    const std::vector<double> b = j.at("bias");
    if (w.size() != l.weights.size())
      throw FormatError("weight array length mismatch");
    if (b.size() != l.bias.size())
      throw FormatError("bias array length mismatch");
    l.weights.data = w;
    l.bias.data = b;
  }
  return l;
}

}  // namespace

void save_model(const Network& net, const Mask& mask,
                const std::string& path) {
  json j;
  j["layers"] = json::array();
  for (const LayerSpec& l : net.layers) j["layers"].push_back(layer_to_json(l));
  j["mask"] = json::array();
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    json bits = json::array();
    if (i < mask.layers.size())
      for (std::uint8_t b : mask.layers[i]) bits.push_back(b ? 1 : 0);
    j["mask"].push_back(bits);
  }
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write model: " + path);
  // nlohmann::json keeps object keys sorted, so this dump is canonical.
  out << j.dump(2) << "\n";
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open model: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError("invalid model JSON: " + std::string(e.what()));
  }
  ModelFile mf;
  try {
    for (const json& lj : j.at("layers"))
      mf.net.layers.push_back(layer_from_json(lj));
    mf.net.assign_names();
    mf.net.validate();
    mf.mask = Mask::all_alive(mf.net);
    if (j.contains("mask")) {
      const json& masks = j.at("mask");
      for (std::size_t i = 0; i < masks.size() && i < mf.mask.layers.size();
           ++i) {
        if (masks[i].empty()) continue;
        const std::vector<int> bits = masks[i];
        if (bits.size() != mf.mask.layers[i].size())
          throw FormatError("mask length mismatch at layer " +
                            std::to_string(i));
        for (std::size_t b = 0; b < bits.size(); ++b)
          mf.mask.layers[i][b] = bits[b] ? 1 : 0;
      }
    }
  } catch (const json::exception& e) {
    throw FormatError("invalid model file: " + std::string(e.what()));
  }
  mf.mask.apply(mf.net);
  return mf;
}

}  // namespace rap
