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

#include "stim/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "stim/error.hpp"

namespace stim {

std::size_t element_count(const Dims& dims) {
  if (dims.empty()) return 0;
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

std::string to_string(const Dims& dims) {
  std::string out = "[";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(dims[i]);
  }
  return out + "]";
}

Tensor::Tensor(Dims dims, float fill) : dims_(std::move(dims)) {
  for (auto d : dims_)
    if (d == 0) throw InvalidArgument("tensor dims must be positive: " + to_string(dims_));
  data_.assign(element_count(dims_), fill);
}

Tensor::Tensor(Dims dims, std::vector<float> data) : dims_(std::move(dims)), data_(std::move(data)) {
  for (auto d : dims_)
    if (d == 0) throw InvalidArgument("tensor dims must be positive: " + to_string(dims_));
  if (element_count(dims_) != data_.size())
    throw InvalidArgument("tensor data length " + std::to_string(data_.size()) +
                          " does not match dims " + to_string(dims_));
}

std::size_t Tensor::planes() const {
  if (rank() < 2) throw InvalidArgument("tensor has no spatial axes: " + to_string(dims_));
  return size() / (height() * width());
}

float& Tensor::at(std::size_t c, std::size_t y, std::size_t x) {
  return data_[(c * height() + y) * width() + x];
}

float Tensor::at(std::size_t c, std::size_t y, std::size_t x) const {
  return data_[(c * height() + y) * width() + x];
}

std::span<float> Tensor::plane(std::size_t p) {
  const std::size_t n = height() * width();
  return std::span<float>(data_).subspan(p * n, n);
}

std::span<const float> Tensor::plane(std::size_t p) const {
  const std::size_t n = height() * width();
  return std::span<const float>(data_).subspan(p * n, n);
}

Tensor Tensor::reshaped(Dims dims) const {
  if (element_count(dims) != size())
    throw InvalidArgument("cannot reshape " + to_string(dims_) + " to " + to_string(dims));
  return Tensor(std::move(dims), data_);
}

bool Tensor::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](float v) { return std::isfinite(v); });
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (a.dims() != b.dims())
    throw InvalidArgument("shape mismatch " + to_string(a.dims()) + " vs " + to_string(b.dims()));
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i])));
  return m;
}

}  // namespace stim
