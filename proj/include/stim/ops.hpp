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

#include "stim/tensor.hpp"

// Primitive spatial operators. All are pure; windowed reductions accumulate
// in double and use floor semantics for output extents.

namespace stim {

enum class PadMode { zero, reflection, circular };

std::string_view to_string(PadMode mode);
PadMode parse_pad_mode(std::string_view name);

struct PaddingSpec {
  PadMode mode = PadMode::zero;
  std::size_t top = 0;
  std::size_t bottom = 0;
  std::size_t left = 0;
  std::size_t right = 0;

  static PaddingSpec uniform(PadMode mode, std::size_t amount) {
    return {mode, amount, amount, amount, amount};
  }
  bool is_none() const noexcept { return top == 0 && bottom == 0 && left == 0 && right == 0; }
  friend bool operator==(const PaddingSpec&, const PaddingSpec&) = default;
};

/// Kernel is out x in x kH x kW; bias has one entry per output channel.
struct ConvSpec {
  Tensor kernel;
  std::vector<float> bias;
  std::size_t stride = 1;
  PaddingSpec padding;
};

Tensor pad(const Tensor& x, const PaddingSpec& spec);

/// Spatial window [top, top+h) x [left, left+w) of every plane.
Tensor crop(const Tensor& x, std::size_t top, std::size_t left, std::size_t h, std::size_t w);

/// Cross-correlation of a (C,H,W) or (N,C,H,W) input.
Tensor conv2d(const Tensor& x, const ConvSpec& spec);

/// Applies the same kH x kW `kernel` to every plane independently.
Tensor depthwise_conv2d(const Tensor& x, const std::vector<double>& kernel, std::size_t kh,
                        std::size_t kw, std::size_t stride, const PaddingSpec& padding);

Tensor maxpool(const Tensor& x, std::size_t window, std::size_t stride);
Tensor avgpool(const Tensor& x, std::size_t window, std::size_t stride);

/// Keeps spatial indices 0, factor, 2*factor, ... on both axes.
Tensor downsample(const Tensor& x, std::size_t factor);

/// out(y, x) = in(y - dy mod H, x - dx mod W).
Tensor shift_circular(const Tensor& x, long dy, long dx);

Tensor relu(const Tensor& x);
Tensor add(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, float factor);

/// floor((extent - window) / stride) + 1; throws when window exceeds extent.
std::size_t pooled_extent(std::size_t extent, std::size_t window, std::size_t stride);

}  // namespace stim
