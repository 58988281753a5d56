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

#include <cstddef>
#include <string_view>
#include <vector>

#include "stim/ops.hpp"
#include "stim/tensor.hpp"

// Anti-aliased composite operators: low-pass filtering ahead of every
// subsampling step, plus the strided-convolution placements and skip blocks
// built from it.

namespace stim {

/// Normalized outer product of a binomial row: size 3 is [1,2,1]/4 per axis.
/// Size 1 is the identity filter.
struct BlurKernel {
  std::size_t size = 3;
  std::vector<double> coefficients;  // size x size, row-major

  static BlurKernel binomial(std::size_t size);

  // Per-side blur padding that keeps the spatial extent: (size-1)/2 before,
  // size/2 after.
  std::size_t pad_before() const noexcept { return (size - 1) / 2; }
  std::size_t pad_after() const noexcept { return size / 2; }
};

/// Blur every channel with `k`, then keep every `stride`-th sample.
/// `border` is the blur's padding mode; circular is for equivariance checks.
Tensor blurpool(const Tensor& x, const BlurKernel& k, std::size_t stride,
                PadMode border = PadMode::reflection);

/// Stride-1 max pooling followed by blurpool. With a circular border the
/// pooling window wraps so that the spatial extent is kept.
Tensor max_blurpool(const Tensor& x, std::size_t window, const BlurKernel& k, std::size_t stride,
                    PadMode border = PadMode::reflection);

/// Blur-then-subsample replacement for average pooling.
Tensor avg_blurpool(const Tensor& x, const BlurKernel& k, std::size_t stride,
                    PadMode border = PadMode::reflection);

enum class BlurPlacement { original, feat_after_blur, blur_before_act };

std::string_view to_string(BlurPlacement p);
BlurPlacement parse_placement(std::string_view name);

struct AAConvVariant {
  BlurPlacement placement = BlurPlacement::original;
  std::size_t conv_stride = 1;
  std::size_t blur_stride = 1;

  std::size_t total_stride() const noexcept { return conv_stride * blur_stride; }

  /// Splits `total_stride` into a reduced conv stride and a blur stride.
  /// Throws ConfigError unless conv_stride divides total_stride.
  static AAConvVariant replacing(std::size_t total_stride, std::size_t conv_stride,
                                 BlurPlacement placement);
};

struct AAConvResult {
  Tensor output;  // passed to the next layer
  Tensor tap;     // feature embedding exported at this layer
};

/// Anti-aliased strided convolution with ReLU.
///   original:        conv -> relu -> [tap] -> blurpool -> output
///   feat_after_blur: conv -> relu -> blurpool -> [tap == output]
///   blur_before_act: conv -> blurpool -> relu -> [tap == output]
/// A blur stride of 1 needs no anti-aliasing and reduces to conv -> relu.
AAConvResult aa_strided_conv(const Tensor& x, const ConvSpec& spec, const AAConvVariant& variant,
                             const BlurKernel& k, PadMode border = PadMode::reflection);

/// Full convolution: zero padding of 2k on each side for a (2k+1) kernel, so
/// every coefficient touches every input pixel. `spec.padding` is ignored.
Tensor fconv(const Tensor& x, const ConvSpec& spec);

enum class SkipKind { identity, strided, aa_strided };

std::string_view to_string(SkipKind kind);
SkipKind parse_skip_kind(std::string_view name);

struct SkipBlockSpec {
  std::vector<ConvSpec> main;  // relu between consecutive convs, none after the last
  SkipKind skip = SkipKind::identity;
  ConvSpec projection;  // 1x1 kernel used by strided skips; its stride is ignored
};

/// Product of the main path's conv strides.
std::size_t block_stride(const SkipBlockSpec& spec);

/// mainPath(x) + skipPath(x). The strided skip is a 1x1 conv at the block
/// stride; the anti-aliased skip is a stride-1 1x1 conv followed by blurpool.
Tensor aa_skip_block(const Tensor& x, const SkipBlockSpec& spec, const BlurKernel& k,
                     PadMode border = PadMode::reflection);

}  // namespace stim
