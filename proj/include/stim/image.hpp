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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "stim/tensor.hpp"

// Binary PPM (P6) images as 3 x H x W tensors in [-1, 1].

namespace stim {

inline float byte_to_unit(std::uint8_t v) { return static_cast<float>(v / 127.5 - 1.0); }

inline std::uint8_t unit_to_byte(float x) {
  const double v = std::round((static_cast<double>(x) + 1.0) * 127.5);
  return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

/// Rounds every element onto the 8-bit grid.
Tensor quantize(const Tensor& x);

/// Decodes a P6 file with maxval 255. Header comments are allowed.
Tensor decode_ppm(std::span<const std::uint8_t> bytes);
Tensor decode_image(const std::filesystem::path& path);

/// 3 x H x W input.
std::vector<std::uint8_t> encode_ppm(const Tensor& image);
void write_ppm(const Tensor& image, const std::filesystem::path& path);

/// Grayscale P5 of a 1 x H x W (or H x W) map with values in [0, 1].
std::vector<std::uint8_t> encode_pgm(const Tensor& map);
void write_pgm(const Tensor& map, const std::filesystem::path& path);

}  // namespace stim
