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
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace stim {

using Dims = std::vector<std::size_t>;

/// Dense row-major float tensor. The last two axes are spatial (height,
/// width); a rank-3 tensor is channels x height x width, rank 4 adds a
/// leading batch axis.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Dims dims, float fill = 0.0f);
  Tensor(Dims dims, std::vector<float> data);

  static Tensor zeros(Dims dims) { return Tensor(std::move(dims)); }
  static Tensor filled(Dims dims, float v) { return Tensor(std::move(dims), v); }

  const Dims& dims() const noexcept { return dims_; }
  std::size_t rank() const noexcept { return dims_.size(); }
  std::size_t dim(std::size_t axis) const { return dims_.at(axis); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  // Spatial accessors; valid for rank >= 2.
  std::size_t height() const { return dims_.at(rank() - 2); }
  std::size_t width() const { return dims_.at(rank() - 1); }
  // Channel extent for rank >= 3, else 1.
  std::size_t channels() const { return rank() >= 3 ? dims_[rank() - 3] : 1; }
  // Number of independent H x W planes.
  std::size_t planes() const;

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }
  float* raw() noexcept { return data_.data(); }
  const float* raw() const noexcept { return data_.data(); }

  float& operator[](std::size_t i) { return data_[i]; }
  float operator[](std::size_t i) const { return data_[i]; }

  // Rank-3 element access (c, y, x).
  float& at(std::size_t c, std::size_t y, std::size_t x);
  float at(std::size_t c, std::size_t y, std::size_t x) const;

  std::span<float> plane(std::size_t p);
  std::span<const float> plane(std::size_t p) const;

  Tensor reshaped(Dims dims) const;

  bool all_finite() const noexcept;

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.dims_ == b.dims_ && a.data_ == b.data_;
  }

 private:
  Dims dims_;
  std::vector<float> data_;
};

std::size_t element_count(const Dims& dims);
std::string to_string(const Dims& dims);

/// Largest absolute elementwise difference; throws on shape mismatch.
double max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace stim
