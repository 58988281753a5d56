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

#include "stim/config.hpp"

#include <algorithm>
#include <filesystem>

#include <json.hpp>

#include "stim/dataset.hpp"
#include "stim/error.hpp"

namespace stim {
namespace {

using nlohmann::json;

json padding_json(const PaddingSpec& p) {
  return {{"mode", std::string(to_string(p.mode))},
          {"top", p.top},
          {"bottom", p.bottom},
          {"left", p.left},
          {"right", p.right}};
}

PaddingSpec padding_from(const json& j) {
  PaddingSpec p;
  p.mode = parse_pad_mode(j.value("mode", std::string("zero")));
  p.top = j.value("top", std::size_t{0});
  p.bottom = j.value("bottom", std::size_t{0});
  p.left = j.value("left", std::size_t{0});
  p.right = j.value("right", std::size_t{0});
  return p;
}

json geometry_json(const ConvGeometry& g) {
  return {{"in", g.in_channels},     {"out", g.out_channels},          {"kernel", g.kernel},
          {"stride", g.stride},      {"padding", padding_json(g.padding)}};
}

ConvGeometry geometry_from(const json& j) {
  ConvGeometry g;
  g.in_channels = j.at("in").get<std::size_t>();
  g.out_channels = j.at("out").get<std::size_t>();
  g.kernel = j.value("kernel", std::size_t{1});
  g.stride = j.value("stride", std::size_t{1});
  if (j.contains("padding")) g.padding = padding_from(j.at("padding"));
  return g;
}

json layer_json(const LayerSpec& layer) {
  json j = {{"name", layer.name}, {"kind", std::string(to_string(layer.kind()))}, {"tap", layer.tap}};
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ConvLayer> || std::is_same_v<T, FConvLayer>) {
          j.update(geometry_json(p.geom));
        } else if constexpr (std::is_same_v<T, AAConvLayer>) {
          j.update(geometry_json(p.geom));
          j["placement"] = std::string(to_string(p.variant.placement));
          j["blur_stride"] = p.variant.blur_stride;
          j["blur_size"] = p.blur_size;
        } else if constexpr (std::is_same_v<T, MaxPoolLayer>) {
          j["window"] = p.window;
          j["stride"] = p.stride;
        } else if constexpr (std::is_same_v<T, MaxBlurPoolLayer>) {
          j["window"] = p.window;
          j["stride"] = p.stride;
          j["blur_size"] = p.blur_size;
        } else if constexpr (std::is_same_v<T, AvgBlurPoolLayer>) {
          j["stride"] = p.stride;
          j["blur_size"] = p.blur_size;
        } else if constexpr (std::is_same_v<T, SkipBlockLayer>) {
          j["main"] = json::array();
          for (const auto& g : p.main) j["main"].push_back(geometry_json(g));
          j["skip"] = std::string(to_string(p.skip));
          j["blur_size"] = p.blur_size;
        }
      },
      layer.params);
  return j;
}

LayerSpec layer_from(const json& j) {
  LayerSpec layer;
  layer.name = j.at("name").get<std::string>();
  layer.tap = j.value("tap", false);
  switch (parse_layer_kind(j.at("kind").get<std::string>())) {
    case LayerKind::conv:
      layer.params = ConvLayer{geometry_from(j)};
      break;
    case LayerKind::fconv:
      layer.params = FConvLayer{geometry_from(j)};
      break;
    case LayerKind::aa_conv: {
      AAConvLayer p;
      p.geom = geometry_from(j);
      p.variant.placement = parse_placement(j.value("placement", std::string("blur_before_act")));
      p.variant.conv_stride = p.geom.stride;
      p.variant.blur_stride = j.value("blur_stride", std::size_t{1});
      p.blur_size = j.value("blur_size", std::size_t{3});
      layer.params = p;
      break;
    }
    case LayerKind::maxpool:
      layer.params = MaxPoolLayer{j.value("window", std::size_t{2}), j.value("stride", std::size_t{2})};
      break;
    case LayerKind::max_blurpool:
      layer.params = MaxBlurPoolLayer{j.value("window", std::size_t{2}), j.value("stride", std::size_t{2}),
                                      j.value("blur_size", std::size_t{3})};
      break;
    case LayerKind::avg_blurpool:
      layer.params = AvgBlurPoolLayer{j.value("stride", std::size_t{2}), j.value("blur_size", std::size_t{3})};
      break;
    case LayerKind::relu:
      layer.params = ReluLayer{};
      break;
    case LayerKind::skip_block: {
      SkipBlockLayer p;
      for (const auto& g : j.at("main")) p.main.push_back(geometry_from(g));
      p.skip = parse_skip_kind(j.value("skip", std::string("identity")));
      p.blur_size = j.value("blur_size", std::size_t{3});
      layer.params = p;
      break;
    }
  }
  return layer;
}

}  // namespace

std::string backbone_to_json(const BackboneConfig& cfg) {
  json j = {{"name", cfg.name}, {"input_channels", cfg.input_channels}, {"min_input", cfg.min_input}};
  j["layers"] = json::array();
  for (const auto& layer : cfg.layers) j["layers"].push_back(layer_json(layer));
  return j.dump(2) + "\n";
}

BackboneConfig backbone_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("backbone json: ") + e.what());
  }
  BackboneConfig cfg;
  try {
    cfg.name = j.value("name", std::string("custom"));
    cfg.input_channels = j.value("input_channels", std::size_t{3});
    cfg.min_input = j.value("min_input", std::size_t{16});
    const json& layers = j.at("layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      try {
        cfg.layers.push_back(layer_from(layers[i]));
      } catch (const json::exception& e) {
        throw ConfigError("layer " + std::to_string(i) + ": " + e.what());
      } catch (const InvalidArgument& e) {
        throw ConfigError("layer " + std::to_string(i) + ": " + e.what());
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("backbone json: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

BackboneConfig resolve_backbone(const std::string& name_or_path) {
  const auto names = preset_names();
  if (std::find(names.begin(), names.end(), name_or_path) != names.end()) return preset(name_or_path);
  if (!std::filesystem::exists(name_or_path))
    throw ConfigError("unknown backbone '" + name_or_path + "' (not a preset or file)");
  return backbone_from_json(read_text(name_or_path));
}

}  // namespace stim
