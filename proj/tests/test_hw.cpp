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

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "rap/errors.hpp"
#include "rap/hw.hpp"
#include "rap/structures.hpp"

using rap::Granularity;
using rap::LayerHwConfig;
using rap::LayerSpec;
using rap::ResourceVector;
using rap::Strategy;

namespace {

LayerHwConfig make_cfg(int rf, int p, Strategy s, Granularity g) {
  LayerHwConfig cfg;
  cfg.reuse_factor = rf;
  cfg.precision = {p, std::min(p, 6)};
  cfg.strategy = s;
  cfg.granularity = g;
  return cfg;
}

}  // namespace

TEST_CASE("consecutive_groups table") {
  CHECK(rap::consecutive_groups(18) == 2);
  CHECK(rap::consecutive_groups(9) == 4);
  CHECK(rap::consecutive_groups(16) == 5);
  CHECK(rap::consecutive_groups(36) == 1);
  CHECK_THROWS_AS(rap::consecutive_groups(1), rap::ConfigError);
  CHECK_THROWS_AS(rap::consecutive_groups(37), rap::ConfigError);
}

TEST_CASE("consecutive_groups packing identity") {
  for (int p = 2; p <= 36; ++p) {
    const int c = rap::consecutive_groups(p);
    if (36 % p == 0)
      CHECK(c * p == 36);
    else
      CHECK(c * p >= 72);
  }
}

TEST_CASE("dsp_per_multiplier threshold") {
  CHECK(rap::dsp_per_multiplier(9) == 0);
  CHECK(rap::dsp_per_multiplier(10) == 1);
  CHECK(rap::dsp_per_multiplier(16) == 1);
}

TEST_CASE("group_resource fixtures") {
  CHECK(rap::group_resource(make_cfg(1, 18, Strategy::kLatency,
                                     Granularity::kUnstructured)) ==
        ResourceVector{1, 0});
  CHECK(rap::group_resource(make_cfg(4, 18, Strategy::kResource,
                                     Granularity::kBramAware)) ==
        ResourceVector{2, 1});
  CHECK(rap::group_resource(make_cfg(4, 9, Strategy::kResource,
                                     Granularity::kBramAware)) ==
        ResourceVector{0, 1});
  CHECK(rap::group_resource(make_cfg(4, 16, Strategy::kResource,
                                     Granularity::kDspAware)) ==
        ResourceVector{1, 0});
}

TEST_CASE("invalid strategy/granularity combinations are rejected") {
  CHECK_THROWS_AS(make_cfg(1, 18, Strategy::kLatency, Granularity::kDspAware)
                      .validate(),
                  rap::ConfigError);
  CHECK_THROWS_AS(make_cfg(1, 18, Strategy::kResource,
                           Granularity::kUnstructured)
                      .validate(),
                  rap::ConfigError);
}

TEST_CASE("layer_baseline fixtures") {
  SUBCASE("dense 16x5, RF=4, P=16, Resource") {
    const ResourceVector r = rap::layer_baseline(
        LayerSpec::dense(16, 5),
        make_cfg(4, 16, Strategy::kResource, Granularity::kDspAware));
    CHECK(r.dsp == 20);
  }
  SUBCASE("dense 64x32, RF=8, P=18, Resource") {
    const ResourceVector r = rap::layer_baseline(
        LayerSpec::dense(64, 32),
        make_cfg(8, 18, Strategy::kResource, Granularity::kDspAware));
    CHECK(r.dsp == 256);
    CHECK(r.bram == 128);
  }
  SUBCASE("conv 3x3x1x4, Latency, P=18") {
    const ResourceVector r = rap::layer_baseline(
        LayerSpec::conv2d(3, 3, 1, 4),
        make_cfg(1, 18, Strategy::kLatency, Granularity::kUnstructured));
    CHECK(r == ResourceVector{36, 0});
  }
  SUBCASE("RF larger than the weight count is rejected") {
    CHECK_THROWS_AS(
        rap::layer_baseline(LayerSpec::dense(2, 2),
                            make_cfg(5, 16, Strategy::kResource,
                                     Granularity::kDspAware)),
        rap::ConfigError);
  }
  SUBCASE("DSP is nonincreasing in RF") {
    long prev = 1 << 20;
    for (int rf : {1, 2, 3, 5, 8, 16, 80}) {
      const long dsp =
          rap::layer_baseline(LayerSpec::dense(16, 5),
                              make_cfg(rf, 16, Strategy::kResource,
                                       Granularity::kDspAware))
              .dsp;
      CHECK(dsp <= prev);
      prev = dsp;
    }
  }
}

TEST_CASE("network_baseline sums layers and ignores the mask") {
  rap::Network net;
  net.layers.push_back(LayerSpec::dense(16, 64));
  net.layers.push_back(LayerSpec::relu());
  net.layers.push_back(LayerSpec::dense(64, 32));
  net.layers.push_back(LayerSpec::dense(32, 32));
  net.layers.push_back(LayerSpec::dense(32, 5));
  rap::init_weights(net, 1);
  net.assign_names();
  CHECK(net.parameter_count() == 4389);

  rap::HardwareConfig hw;
  hw.defaults = make_cfg(4, 16, Strategy::kResource, Granularity::kDspAware);
  const ResourceVector total = rap::network_baseline(net, hw);
  // ceil(1024/4) + ceil(2048/4) + ceil(1024/4) + ceil(160/4)
  CHECK(total.dsp == 256 + 512 + 256 + 40);

  rap::Mask mask = rap::Mask::all_alive(net);
  mask.layers[0].assign(mask.layers[0].size(), 0);
  CHECK(rap::network_baseline(net, hw) == total);
  const ResourceVector masked = rap::masked_network_resources(net, hw, mask);
  CHECK(masked.dsp == total.dsp - 256);
}

TEST_CASE("baseline equals group sum on every modeled dimension") {
  const std::vector<std::pair<std::size_t, std::size_t>> shapes = {
      {3, 4}, {16, 5}, {10, 1}, {7, 7}, {64, 32}};
  for (auto [n_in, n_out] : shapes) {
    const LayerSpec layer = LayerSpec::dense(n_in, n_out);
    for (int rf : {1, 2, 3, 8, 16}) {
      if (static_cast<std::size_t>(rf) > n_in * n_out) continue;
      for (int p : {9, 16, 18}) {
        for (Granularity g :
             {Granularity::kDspAware, Granularity::kBramAware}) {
          const LayerHwConfig cfg = make_cfg(rf, p, Strategy::kResource, g);
          const ResourceVector base = rap::layer_baseline(layer, cfg);
          ResourceVector sum;
          for (const rap::ResourceGroup& grp :
               rap::extract_groups(layer, cfg, 0))
            sum += grp.resource;
          CHECK(sum.dsp == base.dsp);
          if (g == Granularity::kBramAware) CHECK(sum.bram == base.bram);
        }
      }
    }
  }
}

TEST_CASE("hardware config file round trip") {
  rap::HardwareConfig hw;
  hw.defaults = make_cfg(8, 18, Strategy::kResource, Granularity::kDspAware);
  hw.per_layer["dense_1"] =
      make_cfg(4, 9, Strategy::kResource, Granularity::kBramAware);

  const std::string path =
      (std::filesystem::temp_directory_path() / "rap_hwcfg_test.json")
          .string();
  rap::save_hwconfig(hw, path);
  const rap::HardwareConfig back = rap::load_hwconfig(path);
  std::remove(path.c_str());

  CHECK(back.defaults.reuse_factor == 8);
  CHECK(back.defaults.precision.total_bits == 18);
  CHECK(back.for_layer("dense_0").granularity == Granularity::kDspAware);
  CHECK(back.for_layer("dense_1").granularity == Granularity::kBramAware);
  CHECK(back.for_layer("dense_1").precision.total_bits == 9);
}
