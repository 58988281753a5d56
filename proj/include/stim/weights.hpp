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
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "stim/tensor.hpp"

namespace stim {

/// Named tensors. Iteration order is lexicographic by name, which is also
/// the on-disk entry order.
class WeightStore {
 public:
  void set(const std::string& name, Tensor t) { entries_[name] = std::move(t); }
  const Tensor& get(const std::string& name) const;
  bool contains(const std::string& name) const { return entries_.count(name) != 0; }
  void erase(const std::string& name) { entries_.erase(name); }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::map<std::string, Tensor>& entries() const noexcept { return entries_; }

  /// Copies every entry of `other` into this store, replacing duplicates.
  void merge(const WeightStore& other);

  friend bool operator==(const WeightStore& a, const WeightStore& b);

 private:
  std::map<std::string, Tensor> entries_;
};

// STPW layout, all integers unsigned 32-bit little-endian:
//   "STPW" | version (1) | entry count
//   per entry: name length | UTF-8 name | rank | dims[rank] | float32 LE data
inline constexpr std::uint32_t kWeightFormatVersion = 1;

std::vector<std::uint8_t> serialize_weights(const WeightStore& store);
WeightStore parse_weights(std::span<const std::uint8_t> bytes);

void save_weights(const WeightStore& store, const std::filesystem::path& path);
WeightStore load_weights(const std::filesystem::path& path);

}  // namespace stim
