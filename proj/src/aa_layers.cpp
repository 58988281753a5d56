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

#include "stim/aa_layers.hpp"

#include <string>

#include "stim/error.hpp"

namespace stim {

BlurKernel BlurKernel::binomial(std::size_t size) {
  if (size < 1 || size > 7)
    throw InvalidArgument("blur kernel size must be in [1, 7], got " + std::to_string(size));
  std::vector<double> row{1.0};
  for (std::size_t i = 1; i < size; ++i) {
    std::vector<double> next(row.size() + 1, 0.0);
    for (std::size_t j = 0; j < row.size(); ++j) {
      next[j] += row[j];
      next[j + 1] += row[j];
    }
    row = std::move(next);
  }
  double sum = 0.0;
  for (double v : row) sum += v;
  BlurKernel k;
  k.size = size;
  k.coefficients.resize(size * size);
  // Binomial rows sum to a power of two, so every coefficient is exact.
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t j = 0; j < size; ++j) k.coefficients[i * size + j] = row[i] * row[j] / (sum * sum);
  return k;
}

Tensor blurpool(const Tensor& x, const BlurKernel& k, std::size_t stride, PadMode border) {
  if (stride == 0) throw InvalidArgument("blurpool: stride must be >= 1");
  const PaddingSpec pad{border, k.pad_before(), k.pad_after(), k.pad_before(), k.pad_after()};
  return depthwise_conv2d(x, k.coefficients, k.size, k.size, stride, pad);
}

Tensor max_blurpool(const Tensor& x, std::size_t window, const BlurKernel& k, std::size_t stride,
                    PadMode border) {
  if (border == PadMode::circular) {
    const PaddingSpec wrap{PadMode::circular, 0, window - 1, 0, window - 1};
    return blurpool(maxpool(pad(x, wrap), window, 1), k, stride, border);
  }
  return blurpool(maxpool(x, window, 1), k, stride, border);
}

Tensor avg_blurpool(const Tensor& x, const BlurKernel& k, std::size_t stride, PadMode border) {
  return blurpool(x, k, stride, border);
}

std::string_view to_string(BlurPlacement p) {
  switch (p) {
    case BlurPlacement::original: return "original";
    case BlurPlacement::feat_after_blur: return "feat_after_blur";
    case BlurPlacement::blur_before_act: return "blur_before_act";
  }
  return "?";
}

BlurPlacement parse_placement(std::string_view name) {
  if (name == "original") return BlurPlacement::original;
  if (name == "feat_after_blur") return BlurPlacement::feat_after_blur;
  if (name == "blur_before_act") return BlurPlacement::blur_before_act;
  throw InvalidArgument("unknown blur placement '" + std::string(name) + "'");
}

AAConvVariant AAConvVariant::replacing(std::size_t total_stride, std::size_t conv_stride,
                                       BlurPlacement placement) {
  if (conv_stride == 0 || total_stride == 0 || total_stride % conv_stride != 0)
    throw ConfigError("conv stride " + std::to_string(conv_stride) +
                      " does not divide total stride " + std::to_string(total_stride));
  return {placement, conv_stride, total_stride / conv_stride};
}

AAConvResult aa_strided_conv(const Tensor& x, const ConvSpec& spec, const AAConvVariant& variant,
                             const BlurKernel& k, PadMode border) {
  if (spec.stride != variant.conv_stride)
    throw ConfigError("aa_strided_conv: conv stride " + std::to_string(spec.stride) +
                      " differs from variant conv stride " + std::to_string(variant.conv_stride));
  if (variant.blur_stride == 0) throw ConfigError("aa_strided_conv: blur stride must be >= 1");
  const Tensor pre = conv2d(x, spec);
  if (variant.blur_stride == 1) {
    Tensor act = relu(pre);
    return {act, act};
  }
  switch (variant.placement) {
    case BlurPlacement::original: {
      Tensor act = relu(pre);
      Tensor out = blurpool(act, k, variant.blur_stride, border);
      return {std::move(out), std::move(act)};
    }
    case BlurPlacement::feat_after_blur: {
      Tensor out = blurpool(relu(pre), k, variant.blur_stride, border);
      return {out, out};
    }
    case BlurPlacement::blur_before_act: {
      Tensor out = relu(blurpool(pre, k, variant.blur_stride, border));
      return {out, out};
    }
  }
  throw ConfigError("aa_strided_conv: unknown placement");
}

Tensor fconv(const Tensor& x, const ConvSpec& spec) {
  if (spec.kernel.rank() != 4) throw InvalidArgument("fconv: kernel must be out x in x kH x kW");
  const std::size_t kh = spec.kernel.dim(2), kw = spec.kernel.dim(3);
  if (kh % 2 == 0 || kw % 2 == 0)
    throw InvalidArgument("fconv: kernel extent must be odd (2k+1), got " + std::to_string(kh) +
                          "x" + std::to_string(kw));
  ConvSpec full = spec;
  full.padding = {PadMode::zero, kh - 1, kh - 1, kw - 1, kw - 1};
  return conv2d(x, full);
}

std::string_view to_string(SkipKind kind) {
  switch (kind) {
    case SkipKind::identity: return "identity";
    case SkipKind::strided: return "strided";
    case SkipKind::aa_strided: return "aa_strided";
  }
  return "?";
}

SkipKind parse_skip_kind(std::string_view name) {
  if (name == "identity") return SkipKind::identity;
  if (name == "strided") return SkipKind::strided;
  if (name == "aa_strided") return SkipKind::aa_strided;
  throw InvalidArgument("unknown skip kind '" + std::string(name) + "'");
}

std::size_t block_stride(const SkipBlockSpec& spec) {
  std::size_t s = 1;
  for (const auto& c : spec.main) s *= c.stride;
  return s;
}

Tensor aa_skip_block(const Tensor& x, const SkipBlockSpec& spec, const BlurKernel& k,
                     PadMode border) {
  if (spec.main.empty()) throw ConfigError("skip block needs at least one main-path conv");
  Tensor main = x;
  for (std::size_t i = 0; i < spec.main.size(); ++i) {
    main = conv2d(main, spec.main[i]);
    if (i + 1 < spec.main.size()) main = relu(main);
  }
  const std::size_t n = block_stride(spec);

  Tensor skip;
  switch (spec.skip) {
    case SkipKind::identity:
      if (n != 1) throw ConfigError("identity skip cannot match a main path of stride " +
                                    std::to_string(n));
      skip = x;
      break;
    case SkipKind::strided: {
      ConvSpec proj = spec.projection;
      proj.stride = n;
      proj.padding = {};
      skip = conv2d(x, proj);
      break;
    }
    case SkipKind::aa_strided: {
      ConvSpec proj = spec.projection;
      proj.stride = 1;
      proj.padding = {};
      skip = conv2d(x, proj);
      if (n > 1) skip = blurpool(skip, k, n, border);
      break;
    }
  }
  if (skip.dims() != main.dims())
    throw ConfigError("skip path " + to_string(skip.dims()) + " does not match main path " +
                      to_string(main.dims()));
  return add(main, skip);
}

}  // namespace stim
