// Copyright 2026 The stim Authors.
//
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

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "stim/aa_layers.hpp"
#include "stim/ops.hpp"
#include "stim/tensor.hpp"
#include "stim/weights.hpp"

namespace stim {

/// Shape of a convolution whose weights live in a WeightStore.
struct ConvGeometry {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 1;  // square kH == kW
  std::size_t stride = 1;
  PaddingSpec padding;

  std::size_t parameter_count() const {
    return out_channels * in_channels * kernel * kernel + out_channels;
  }
};

struct ConvLayer {
  ConvGeometry geom;
};
struct AAConvLayer {
  ConvGeometry geom;  // geom.stride is the reduced conv stride
  AAConvVariant variant;
  std::size_t blur_size = 3;
};
struct MaxPoolLayer {
  std::size_t window = 2;
  std::size_t stride = 2;
};
struct MaxBlurPoolLayer {
  std::size_t window = 2;
  std::size_t stride = 2;
  std::size_t blur_size = 3;
};
struct AvgBlurPoolLayer {
  std::size_t stride = 2;
  std::size_t blur_size = 3;
};
struct ReluLayer {};
struct SkipBlockLayer {
  std::vector<ConvGeometry> main;
  SkipKind skip = SkipKind::identity;
  std::size_t blur_size = 3;
};
struct FConvLayer {
  ConvGeometry geom;  // padding is fixed to 2k zeros
};

using LayerParams = std::variant<ConvLayer, AAConvLayer, MaxPoolLayer, MaxBlurPoolLayer,
                                 AvgBlurPoolLayer, ReluLayer, SkipBlockLayer, FConvLayer>;

enum class LayerKind { conv, aa_conv, maxpool, max_blurpool, avg_blurpool, relu, skip_block, fconv };

std::string_view to_string(LayerKind kind);
LayerKind parse_layer_kind(std::string_view name);

struct LayerSpec {
  std::string name;  // prefix of this layer's weight entries
  LayerParams params;
  bool tap = false;

  LayerKind kind() const { return static_cast<LayerKind>(params.index()); }
};

struct BackboneConfig {
  std::string name;
  std::size_t input_channels = 3;
  std::size_t min_input = 16;  // smallest accepted height and width
  std::vector<LayerSpec> layers;
};

/// One tensor per tapped layer, in layer order.
struct FeatureStack {
  std::vector<Tensor> levels;
};

/// Output dims (C, H, W) after every layer for an input of h x w.
/// Throws InvalidArgument when an extent underflows.
std::vector<Dims> infer_shapes(const BackboneConfig& cfg, std::size_t h, std::size_t w);

/// Channel-chaining, tap and minimum-extent checks. Throws ConfigError.
void validate(const BackboneConfig& cfg);

std::size_t tap_count(const BackboneConfig& cfg);
std::vector<std::size_t> level_channels(const BackboneConfig& cfg);
std::size_t parameter_count(const BackboneConfig& cfg);
std::size_t layer_stride(const LayerSpec& layer);
/// Product of every layer's stride.
std::size_t total_stride(const BackboneConfig& cfg);

/// Weight entry names and dims the config reads at forward time.
std::vector<std::pair<std::string, Dims>> weight_inventory(const BackboneConfig& cfg);

/// He-normal kernels, zero biases; deterministic for a seed. Configs that
/// share layer names and shapes receive identical weights.
WeightStore random_weights(const BackboneConfig& cfg, std::uint64_t seed);

FeatureStack forward(const BackboneConfig& cfg, const WeightStore& weights, const Tensor& x);

/// alex-baseline, alex-st, vgg-small, tiny.
BackboneConfig preset(std::string_view name);
std::vector<std::string> preset_names();

/// Layer table with output shapes at the minimum input size.
std::string describe(const BackboneConfig& cfg);

}  // namespace stim
