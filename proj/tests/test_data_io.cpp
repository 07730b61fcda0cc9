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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "rap/data_io.hpp"
#include "rap/errors.hpp"

namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / name;
}

std::string read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

void write_all(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

void write_be32(std::ofstream& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8)
    out.put(static_cast<char>((v >> shift) & 0xff));
}

void write_idx_pair(const fs::path& images, const fs::path& labels,
                    std::uint32_t n_images, std::uint32_t n_labels,
                    std::uint32_t h, std::uint32_t w,
                    std::uint32_t image_magic = 0x803) {
  std::ofstream img(images, std::ios::binary);
  write_be32(img, image_magic);
  write_be32(img, n_images);
  write_be32(img, h);
  write_be32(img, w);
  for (std::uint32_t i = 0; i < n_images * h * w; ++i)
    img.put(static_cast<char>(i % 256));
  img.close();

  std::ofstream lab(labels, std::ios::binary);
  write_be32(lab, 0x801);
  write_be32(lab, n_labels);
  for (std::uint32_t i = 0; i < n_labels; ++i)
    lab.put(static_cast<char>(i % 3));
}

}  // namespace

TEST_CASE("synth_classify") {
  SUBCASE("identical seeds give identical datasets") {
    const rap::Dataset a = rap::synth_classify(7, 100);
    const rap::Dataset b = rap::synth_classify(7, 100);
    CHECK(a.features.data == b.features.data);
    CHECK(a.labels == b.labels);
    CHECK(a.class_count == 5);
    CHECK(a.features.shape == std::vector<std::size_t>{100, 16});
  }
  SUBCASE("different seeds differ") {
    CHECK(rap::synth_classify(1, 50).features.data !=
          rap::synth_classify(2, 50).features.data);
  }
  SUBCASE("labels are balanced round-robin") {
    const rap::Dataset d = rap::synth_classify(3, 10, 4, 2, 1.0);
    int ones = 0;
    for (int y : d.labels) ones += y;
    CHECK(ones == 5);
  }
}

TEST_CASE("csv round trip") {
  rap::Dataset data;
  data.features = rap::Tensor({3, 2}, {1.5, -2.25, 0.0, 1e-7, 123.0, -4.5});
  data.labels = {0, 2, 1};
  data.class_count = 3;

  const fs::path path = temp_file("rap_csv_test.csv");
  rap::save_csv(data, path.string());
  const rap::Dataset back = rap::load_csv(path.string(), "label");
  fs::remove(path);

  CHECK(back.features.data == data.features.data);
  CHECK(back.labels == data.labels);
  CHECK(back.class_count == 3);
}

TEST_CASE("csv error reporting") {
  const fs::path path = temp_file("rap_csv_bad.csv");
  SUBCASE("missing label column") {
    write_all(path, "a,b\n1,2\n");
    CHECK_THROWS_AS(rap::load_csv(path.string(), "label"), rap::FormatError);
  }
  SUBCASE("ragged row names its line") {
    write_all(path, "a,label\n1,0\n2\n");
    CHECK_THROWS_WITH_AS(rap::load_csv(path.string(), "label"),
                         doctest::Contains("3"), rap::FormatError);
  }
  SUBCASE("non-numeric cell names its line") {
    write_all(path, "a,label\nx,0\n");
    CHECK_THROWS_WITH_AS(rap::load_csv(path.string(), "label"),
                         doctest::Contains("2"), rap::FormatError);
  }
  fs::remove(path);
}

TEST_CASE("idx loader") {
  const fs::path images = temp_file("rap_idx_images");
  const fs::path labels = temp_file("rap_idx_labels");

  SUBCASE("shape and scaling") {
    write_idx_pair(images, labels, 2, 2, 4, 3);
    const rap::Dataset d = rap::load_idx(images.string(), labels.string());
    CHECK(d.features.shape == std::vector<std::size_t>{2, 4, 3, 1});
    CHECK(d.labels == std::vector<int>{0, 1});
    CHECK(d.features.data[0] == 0.0);
    CHECK(d.features.data[12] == doctest::Approx(12.0 / 255.0).epsilon(1e-12));
  }
  SUBCASE("pixel 255 scales to exactly 1.0") {
    write_idx_pair(images, labels, 1, 1, 16, 16);
    const rap::Dataset d = rap::load_idx(images.string(), labels.string());
    CHECK(d.features.data[255] == 1.0);
  }
  SUBCASE("bad magic is a format error") {
    write_idx_pair(images, labels, 1, 1, 2, 2, 0x1234);
    CHECK_THROWS_AS(rap::load_idx(images.string(), labels.string()),
                    rap::FormatError);
  }
  SUBCASE("count mismatch is a format error") {
    write_idx_pair(images, labels, 2, 3, 2, 2);
    CHECK_THROWS_AS(rap::load_idx(images.string(), labels.string()),
                    rap::FormatError);
  }
  SUBCASE("truncated image payload is a format error") {
    write_idx_pair(images, labels, 2, 2, 4, 3);
    fs::resize_file(images, 20);
    CHECK_THROWS_AS(rap::load_idx(images.string(), labels.string()),
                    rap::FormatError);
  }
  fs::remove(images);
  fs::remove(labels);
}

TEST_CASE("model round trip is canonical") {
  rap::Network net;
  net.layers.push_back(rap::LayerSpec::dense(4, 3));
  net.layers.push_back(rap::LayerSpec::relu());
  net.layers.push_back(rap::LayerSpec::conv2d(2, 2, 1, 2));
  net.layers.push_back(rap::LayerSpec::softmax());
  rap::init_weights(net, 9);
  net.assign_names();
  rap::Mask mask = rap::Mask::all_alive(net);
  mask.layers[0][3] = 0;
  mask.layers[2][1] = 0;
  mask.apply(net);

  const fs::path a = temp_file("rap_model_a.json");
  const fs::path b = temp_file("rap_model_b.json");
  rap::save_model(net, mask, a.string());
  const rap::ModelFile back = rap::load_model(a.string());
  rap::save_model(back.net, back.mask, b.string());

  CHECK(read_all(a) == read_all(b));
  CHECK(back.net.layers.size() == net.layers.size());
  CHECK(back.net.layers[0].weights.data == net.layers[0].weights.data);
  CHECK(back.net.layers[2].weights.data == net.layers[2].weights.data);
  CHECK(back.mask.layers == mask.layers);
  fs::remove(a);
  fs::remove(b);
}

TEST_CASE("unknown layer kind is a format error") {
  const fs::path path = temp_file("rap_model_bad.json");
  write_all(path,
            R"({"layers":[{"kind":"pooling","shape":[2,2],"weights":[0,0,0,0],)"
            R"("bias":[0,0]}],"mask":[]})");
  CHECK_THROWS_AS(rap::load_model(path.string()), rap::FormatError);
  fs::remove(path);
}
