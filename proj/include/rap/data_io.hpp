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

#ifndef RAP_DATA_IO_HPP_
#define RAP_DATA_IO_HPP_

#include <cstdint>
#include <string>

#include "rap/nn.hpp"

namespace rap {

// Seeded Gaussian class blobs: class means drawn once from
// separation * N(0, I), samples from mean + N(0, I), labels round-robin.
Dataset synth_classify(std::uint64_t seed, std::size_t n_samples,
                       std::size_t n_features = 16, int n_classes = 5,
                       double separation = 2.0);

// Rectangular numeric CSV with a header row; the named column holds integer
// class labels, every other column is a feature.
Dataset load_csv(const std::string& path, const std::string& label_column);
void save_csv(const Dataset& data, const std::string& path,
              const std::string& label_column = "label");

// IDX image/label pair (big-endian, magics 0x803 / 0x801); pixels scaled to
// [0, 1], features shaped (N, H, W, 1).
Dataset load_idx(const std::string& images_path,
                 const std::string& labels_path);

struct ModelFile {
  Network net;
  Mask mask;
};

// Canonical JSON round trip: sorted keys, shortest round-trip floats, so
// save -> load -> save is byte identical.
void save_model(const Network& net, const Mask& mask, const std::string& path);
ModelFile load_model(const std::string& path);

}  // namespace rap

#endif  // RAP_DATA_IO_HPP_
