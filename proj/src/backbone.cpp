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

#include "stim/backbone.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "stim/error.hpp"
#include "stim/random.hpp"

namespace stim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::string_view kKindNames[] = {"conv",         "aa_conv", "maxpool",    "max_blurpool",
                                           "avg_blurpool", "relu",    "skip_block", "fconv"};

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

void check_blur(std::size_t extent, std::size_t blur_size, const std::string& layer) {
  const BlurKernel k{blur_size, {}};
  if (k.pad_before() >= extent || k.pad_after() >= extent)
    throw InvalidArgument("layer " + layer + ": extent " + std::to_string(extent) +
                          " too small for blur size " + std::to_string(blur_size));
}

struct Shape {
  std::size_t c, h, w;
};

Shape conv_shape(const Shape& in, const ConvGeometry& g, const PaddingSpec& pad,
                 const std::string& layer) {
  if (in.c != g.in_channels)
    throw ConfigError("layer " + layer + ": expects " + std::to_string(g.in_channels) +
                      " input channels, receives " + std::to_string(in.c));
  if (pad.mode == PadMode::reflection &&
      (pad.top >= in.h || pad.bottom >= in.h || pad.left >= in.w || pad.right >= in.w))
    throw InvalidArgument("layer " + layer + ": reflection padding exceeds input extent");
  return {g.out_channels, pooled_extent(in.h + pad.top + pad.bottom, g.kernel, g.stride),
          pooled_extent(in.w + pad.left + pad.right, g.kernel, g.stride)};
}

PaddingSpec full_conv_padding(const ConvGeometry& g) {
  return PaddingSpec::uniform(PadMode::zero, g.kernel - 1);
}

Shape layer_shape(const Shape& in, const LayerSpec& layer) {
  const std::string& nm = layer.name;
  return std::visit(
      overloaded{
          [&](const ConvLayer& p) { return conv_shape(in, p.geom, p.geom.padding, nm); },
          [&](const AAConvLayer& p) {
            if (p.geom.stride != p.variant.conv_stride)
              throw ConfigError("layer " + nm + ": conv stride differs from variant conv stride");
            Shape s = conv_shape(in, p.geom, p.geom.padding, nm);
            if (p.variant.blur_stride > 1) {
              check_blur(s.h, p.blur_size, nm);
              check_blur(s.w, p.blur_size, nm);
              s.h = ceil_div(s.h, p.variant.blur_stride);
              s.w = ceil_div(s.w, p.variant.blur_stride);
            }
            return s;
          },
          [&](const MaxPoolLayer& p) {
            return Shape{in.c, pooled_extent(in.h, p.window, p.stride),
                         pooled_extent(in.w, p.window, p.stride)};
          },
          [&](const MaxBlurPoolLayer& p) {
            Shape s{in.c, pooled_extent(in.h, p.window, 1), pooled_extent(in.w, p.window, 1)};
            check_blur(s.h, p.blur_size, nm);
            check_blur(s.w, p.blur_size, nm);
            return Shape{s.c, ceil_div(s.h, p.stride), ceil_div(s.w, p.stride)};
          },
          [&](const AvgBlurPoolLayer& p) {
            check_blur(in.h, p.blur_size, nm);
            check_blur(in.w, p.blur_size, nm);
            return Shape{in.c, ceil_div(in.h, p.stride), ceil_div(in.w, p.stride)};
          },
          [&](const ReluLayer&) { return in; },
          [&](const SkipBlockLayer& p) {
            if (p.main.empty()) throw ConfigError("layer " + nm + ": empty main path");
            Shape s = in;
            std::size_t n = 1;
            for (const auto& g : p.main) {
              s = conv_shape(s, g, g.padding, nm);
              n *= g.stride;
            }
            Shape skip = in;
            if (p.skip == SkipKind::identity) {
              if (n != 1) throw ConfigError("layer " + nm + ": identity skip on a strided block");
            } else {
              skip.c = s.c;
              if (p.skip == SkipKind::aa_strided && n > 1) {
                check_blur(in.h, p.blur_size, nm);
                check_blur(in.w, p.blur_size, nm);
              }
              skip.h = ceil_div(in.h, n);
              skip.w = ceil_div(in.w, n);
            }
            if (skip.c != s.c || skip.h != s.h || skip.w != s.w)
              throw ConfigError("layer " + nm + ": skip path shape does not match main path");
            return s;
          },
          [&](const FConvLayer& p) { return conv_shape(in, p.geom, full_conv_padding(p.geom), nm); },
      },
      layer.params);
}

ConvSpec load_conv(const WeightStore& weights, const std::string& prefix, const ConvGeometry& g,
                   const PaddingSpec& pad) {
  const Tensor& k = weights.get(prefix + ".weight");
  const Dims expect{g.out_channels, g.in_channels, g.kernel, g.kernel};
  if (k.dims() != expect)
    throw InvalidArgument("weight " + prefix + ".weight has dims " + to_string(k.dims()) +
                          ", expected " + to_string(expect));
  const Tensor& b = weights.get(prefix + ".bias");
  if (b.size() != g.out_channels)
    throw InvalidArgument("weight " + prefix + ".bias has " + std::to_string(b.size()) +
                          " entries, expected " + std::to_string(g.out_channels));
  return ConvSpec{k, {b.data().begin(), b.data().end()}, g.stride, pad};
}

std::uint64_t name_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::string_view to_string(LayerKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

LayerKind parse_layer_kind(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kKindNames); ++i)
    if (kKindNames[i] == name) return static_cast<LayerKind>(i);
  throw InvalidArgument("unknown layer kind '" + std::string(name) + "'");
}

std::vector<Dims> infer_shapes(const BackboneConfig& cfg, std::size_t h, std::size_t w) {
  Shape s{cfg.input_channels, h, w};
  std::vector<Dims> out;
  out.reserve(cfg.layers.size());
  for (const auto& layer : cfg.layers) {
    s = layer_shape(s, layer);
    out.push_back({s.c, s.h, s.w});
  }
  return out;
}

void validate(const BackboneConfig& cfg) {
  if (cfg.layers.empty()) throw ConfigError("backbone '" + cfg.name + "' has no layers");
  if (tap_count(cfg) == 0) throw ConfigError("backbone '" + cfg.name + "' has no feature taps");
  if (cfg.input_channels == 0 || cfg.min_input == 0)
    throw ConfigError("backbone '" + cfg.name + "' has an empty input declaration");
  try {
    infer_shapes(cfg, cfg.min_input, cfg.min_input);
  } catch (const InvalidArgument& e) {
    throw ConfigError("backbone '" + cfg.name + "' underflows at its minimum input " +
                      std::to_string(cfg.min_input) + ": " + e.what());
  }
}

std::size_t tap_count(const BackboneConfig& cfg) {
  std::size_t n = 0;
  for (const auto& l : cfg.layers) n += l.tap ? 1 : 0;
  return n;
}

std::vector<std::size_t> level_channels(const BackboneConfig& cfg) {
  const auto shapes = infer_shapes(cfg, cfg.min_input, cfg.min_input);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cfg.layers.size(); ++i)
    if (cfg.layers[i].tap) out.push_back(shapes[i][0]);
  return out;
}

std::size_t parameter_count(const BackboneConfig& cfg) {
  std::size_t n = 0;
  for (const auto& [name, dims] : weight_inventory(cfg)) n += element_count(dims);
  return n;
}

std::size_t layer_stride(const LayerSpec& layer) {
  return std::visit(overloaded{
                        [](const ConvLayer& p) { return p.geom.stride; },
                        [](const AAConvLayer& p) { return p.variant.total_stride(); },
                        [](const MaxPoolLayer& p) { return p.stride; },
                        [](const MaxBlurPoolLayer& p) { return p.stride; },
                        [](const AvgBlurPoolLayer& p) { return p.stride; },
                        [](const ReluLayer&) { return std::size_t{1}; },
                        [](const SkipBlockLayer& p) {
                          std::size_t n = 1;
                          for (const auto& g : p.main) n *= g.stride;
                          return n;
                        },
                        [](const FConvLayer& p) { return p.geom.stride; },
                    },
                    layer.params);
}

std::size_t total_stride(const BackboneConfig& cfg) {
  std::size_t s = 1;
  for (const auto& l : cfg.layers) s *= layer_stride(l);
  return s;
}

std::vector<std::pair<std::string, Dims>> weight_inventory(const BackboneConfig& cfg) {
  std::vector<std::pair<std::string, Dims>> out;
  auto add_conv = [&](const std::string& prefix, const ConvGeometry& g) {
    out.emplace_back(prefix + ".weight", Dims{g.out_channels, g.in_channels, g.kernel, g.kernel});
    out.emplace_back(prefix + ".bias", Dims{g.out_channels});
  };
  std::size_t in_c = cfg.input_channels;
  for (const auto& layer : cfg.layers) {
    std::visit(overloaded{
                   [&](const ConvLayer& p) { add_conv(layer.name, p.geom); in_c = p.geom.out_channels; },
                   [&](const AAConvLayer& p) { add_conv(layer.name, p.geom); in_c = p.geom.out_channels; },
                   [&](const FConvLayer& p) { add_conv(layer.name, p.geom); in_c = p.geom.out_channels; },
                   [&](const SkipBlockLayer& p) {
                     for (std::size_t i = 0; i < p.main.size(); ++i)
                       add_conv(layer.name + ".main" + std::to_string(i), p.main[i]);
                     if (p.skip != SkipKind::identity && !p.main.empty())
                       add_conv(layer.name + ".proj",
                                ConvGeometry{in_c, p.main.back().out_channels, 1, 1, {}});
                     if (!p.main.empty()) in_c = p.main.back().out_channels;
                   },
                   [](const auto&) {},
               },
               layer.params);
  }
  return out;
}

WeightStore random_weights(const BackboneConfig& cfg, std::uint64_t seed) {
  WeightStore store;
  for (const auto& [name, dims] : weight_inventory(cfg)) {
    Tensor t(dims);
    if (dims.size() == 4) {
      Rng rng(seed ^ name_hash(name));
      const double std_dev = std::sqrt(2.0 / static_cast<double>(dims[1] * dims[2] * dims[3]));
      for (auto& v : t.data()) v = static_cast<float>(std_dev * rng.normal());
    }
    store.set(name, std::move(t));
  }
  return store;
}

FeatureStack forward(const BackboneConfig& cfg, const WeightStore& weights, const Tensor& x) {
  if (x.rank() != 3 || x.channels() != cfg.input_channels)
    throw InvalidArgument("backbone '" + cfg.name + "' expects a " +
                          std::to_string(cfg.input_channels) + "-channel C x H x W input, got " +
                          to_string(x.dims()));
  if (x.height() < cfg.min_input || x.width() < cfg.min_input)
    throw InvalidArgument("backbone '" + cfg.name + "' needs inputs of at least " +
                          std::to_string(cfg.min_input) + "x" + std::to_string(cfg.min_input) +
                          ", got " + to_string(x.dims()));
  FeatureStack stack;
  Tensor cur = x;
  for (const auto& layer : cfg.layers) {
    Tensor tap;
    std::visit(
        overloaded{
            [&](const ConvLayer& p) {
              cur = conv2d(cur, load_conv(weights, layer.name, p.geom, p.geom.padding));
            },
            [&](const AAConvLayer& p) {
              auto r = aa_strided_conv(cur, load_conv(weights, layer.name, p.geom, p.geom.padding),
                                       p.variant, BlurKernel::binomial(p.blur_size));
              cur = std::move(r.output);
              tap = std::move(r.tap);
            },
            [&](const MaxPoolLayer& p) { cur = maxpool(cur, p.window, p.stride); },
            [&](const MaxBlurPoolLayer& p) {
              cur = max_blurpool(cur, p.window, BlurKernel::binomial(p.blur_size), p.stride);
            },
            [&](const AvgBlurPoolLayer& p) {
              cur = avg_blurpool(cur, BlurKernel::binomial(p.blur_size), p.stride);
            },
            [&](const ReluLayer&) { cur = relu(cur); },
            [&](const SkipBlockLayer& p) {
              SkipBlockSpec spec;
              spec.skip = p.skip;
              for (std::size_t i = 0; i < p.main.size(); ++i)
                spec.main.push_back(load_conv(weights, layer.name + ".main" + std::to_string(i),
                                              p.main[i], p.main[i].padding));
              if (p.skip != SkipKind::identity)
                spec.projection = load_conv(
                    weights, layer.name + ".proj",
                    ConvGeometry{cur.channels(), p.main.back().out_channels, 1, 1, {}}, {});
              cur = aa_skip_block(cur, spec, BlurKernel::binomial(p.blur_size));
            },
            [&](const FConvLayer& p) {
              cur = fconv(cur, load_conv(weights, layer.name, p.geom, {}));
            },
        },
        layer.params);
    if (layer.tap) stack.levels.push_back(tap.empty() ? cur : std::move(tap));
  }
  return stack;
}

namespace {

ConvGeometry geom(std::size_t in, std::size_t out, std::size_t k, std::size_t stride,
                  std::size_t pad) {
  return {in, out, k, stride, PaddingSpec::uniform(PadMode::zero, pad)};
}

LayerSpec conv(std::string name, ConvGeometry g) { return {std::move(name), ConvLayer{g}, false}; }
LayerSpec relu_tap(std::string name) { return {std::move(name), ReluLayer{}, true}; }

// Channel widths are a quarter of the classic AlexNet (64-192-384-256-256).
BackboneConfig alex(bool shift_tolerant) {
  BackboneConfig cfg;
  cfg.name = shift_tolerant ? "alex-st" : "alex-baseline";
  cfg.input_channels = 3;
  cfg.min_input = 48;
  if (shift_tolerant) {
    AAConvLayer c1{geom(3, 16, 11, 1, 2),
                   AAConvVariant::replacing(4, 1, BlurPlacement::blur_before_act), 5};
    cfg.layers.push_back({"conv1", c1, true});
    cfg.layers.push_back({"pool1", MaxBlurPoolLayer{3, 2, 5}, false});
  } else {
    cfg.layers.push_back(conv("conv1", geom(3, 16, 11, 4, 2)));
    cfg.layers.push_back(relu_tap("relu1"));
    cfg.layers.push_back({"pool1", MaxPoolLayer{3, 2}, false});
  }
  cfg.layers.push_back(conv("conv2", geom(16, 48, 5, 1, 2)));
  cfg.layers.push_back(relu_tap("relu2"));
  if (shift_tolerant)
    cfg.layers.push_back({"pool2", MaxBlurPoolLayer{3, 2, 5}, false});
  else
    cfg.layers.push_back({"pool2", MaxPoolLayer{3, 2}, false});
  cfg.layers.push_back(conv("conv3", geom(48, 96, 3, 1, 1)));
  cfg.layers.push_back(relu_tap("relu3"));
  cfg.layers.push_back(conv("conv4", geom(96, 64, 3, 1, 1)));
  cfg.layers.push_back(relu_tap("relu4"));
  cfg.layers.push_back(conv("conv5", geom(64, 64, 3, 1, 1)));
  cfg.layers.push_back(relu_tap("relu5"));
  return cfg;
}

BackboneConfig vgg_small() {
  BackboneConfig cfg;
  cfg.name = "vgg-small";
  cfg.min_input = 16;
  cfg.layers.push_back(conv("conv1_1", geom(3, 16, 3, 1, 1)));
  cfg.layers.push_back({"relu1_1", ReluLayer{}, false});
  cfg.layers.push_back(conv("conv1_2", geom(16, 16, 3, 1, 1)));
  cfg.layers.push_back(relu_tap("relu1_2"));
  cfg.layers.push_back({"pool1", AvgBlurPoolLayer{2, 3}, false});
  cfg.layers.push_back(
      {"block2", SkipBlockLayer{{geom(16, 32, 3, 2, 1), geom(32, 32, 3, 1, 1)}, SkipKind::aa_strided, 3},
       false});
  cfg.layers.push_back(relu_tap("relu2"));
  cfg.layers.push_back({"pool2", AvgBlurPoolLayer{2, 3}, false});
  cfg.layers.push_back(conv("conv3", geom(32, 64, 3, 1, 1)));
  cfg.layers.push_back(relu_tap("relu3"));
  return cfg;
}

BackboneConfig tiny() {
  BackboneConfig cfg;
  cfg.name = "tiny";
  cfg.min_input = 8;
  cfg.layers.push_back(conv("conv1", geom(3, 8, 3, 1, 1)));
  cfg.layers.push_back(relu_tap("relu1"));
  cfg.layers.push_back({"pool1", MaxBlurPoolLayer{2, 2, 3}, false});
  cfg.layers.push_back(conv("conv2", geom(8, 16, 3, 1, 1)));
  cfg.layers.push_back(relu_tap("relu2"));
  cfg.layers.push_back({"pool2", MaxBlurPoolLayer{2, 2, 3}, false});
  cfg.layers.push_back(conv("conv3", geom(16, 16, 3, 1, 1)));
  cfg.layers.push_back(relu_tap("relu3"));
  return cfg;
}

std::string layer_detail(const LayerSpec& layer) {
  std::ostringstream os;
  auto conv_text = [&](const ConvGeometry& g) {
    os << g.in_channels << "->" << g.out_channels << " k" << g.kernel << " s" << g.stride;
    if (!g.padding.is_none()) os << " pad " << to_string(g.padding.mode) << ":" << g.padding.top;
  };
  std::visit(overloaded{
                 [&](const ConvLayer& p) { conv_text(p.geom); },
                 [&](const AAConvLayer& p) {
                   conv_text(p.geom);
                   os << " blur" << p.blur_size << " s" << p.variant.blur_stride << " "
                      << to_string(p.variant.placement);
                 },
                 [&](const MaxPoolLayer& p) { os << "w" << p.window << " s" << p.stride; },
                 [&](const MaxBlurPoolLayer& p) {
                   os << "w" << p.window << " blur" << p.blur_size << " s" << p.stride;
                 },
                 [&](const AvgBlurPoolLayer& p) { os << "blur" << p.blur_size << " s" << p.stride; },
                 [&](const ReluLayer&) {},
                 [&](const SkipBlockLayer& p) {
                   os << p.main.size() << " convs, " << to_string(p.skip) << " skip";
                 },
                 [&](const FConvLayer& p) {
                   conv_text(p.geom);
                   os << " full";
                 },
             },
             layer.params);
  return os.str();
}

}  // namespace

BackboneConfig preset(std::string_view name) {
  if (name == "alex-baseline") return alex(false);
  if (name == "alex-st") return alex(true);
  if (name == "vgg-small") return vgg_small();
  if (name == "tiny") return tiny();
  throw InvalidArgument("unknown backbone preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() { return {"alex-baseline", "alex-st", "vgg-small", "tiny"}; }

std::string describe(const BackboneConfig& cfg) {
  const auto shapes = infer_shapes(cfg, cfg.min_input, cfg.min_input);
  std::ostringstream os;
  os << "backbone " << cfg.name << ": " << cfg.input_channels << " input channels, minimum input "
     << cfg.min_input << "x" << cfg.min_input << ", total stride " << total_stride(cfg) << ", "
     << parameter_count(cfg) << " parameters\n";
  int detail_width = 8;
  for (const auto& layer : cfg.layers)
    detail_width = std::max(detail_width, static_cast<int>(layer_detail(layer).size()) + 2);
  os << std::left << std::setw(4) << "#" << std::setw(10) << "layer" << std::setw(14) << "kind"
     << std::setw(detail_width) << "detail" << std::setw(14) << "output" << std::setw(8) << "stride"
     << std::setw(10) << "params"
     << "tap\n";
  const auto inventory = weight_inventory(cfg);
  std::size_t level = 0;
  for (std::size_t i = 0; i < cfg.layers.size(); ++i) {
    const auto& layer = cfg.layers[i];
    std::size_t params = 0;
    const std::string prefix = layer.name + ".";
    for (const auto& [n, d] : inventory)
      if (n.rfind(prefix, 0) == 0) params += element_count(d);
    os << std::setw(4) << i << std::setw(10) << layer.name << std::setw(14)
       << to_string(layer.kind()) << std::setw(detail_width) << layer_detail(layer) << std::setw(14)
       << to_string(shapes[i]) << std::setw(8) << layer_stride(layer) << std::setw(10) << params
       << (layer.tap ? "level " + std::to_string(level++) : std::string("-")) << "\n";
  }
  return os.str();
}

}  // namespace stim
