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

#include "stim/weights.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "stim/error.hpp"

namespace stim {

const Tensor& WeightStore::get(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw WeightNotFound(name);
  return it->second;
}

void WeightStore::merge(const WeightStore& other) {
  for (const auto& [name, t] : other.entries_) entries_[name] = t;
}

bool operator==(const WeightStore& a, const WeightStore& b) {
  if (a.entries_.size() != b.entries_.size()) return false;
  for (auto ia = a.entries_.begin(), ib = b.entries_.begin(); ia != a.entries_.end(); ++ia, ++ib) {
    if (ia->first != ib->first || ia->second.dims() != ib->second.dims()) return false;
    if (std::memcmp(ia->second.raw(), ib->second.raw(), ia->second.size() * sizeof(float)) != 0)
      return false;
  }
  return true;
}

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t u32(const std::string& field) {
    need(4, field);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }

  std::span<const std::uint8_t> take(std::size_t n, const std::string& field) {
    need(n, field);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  bool at_end() const { return pos_ == bytes_.size(); }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n, const std::string& field) {
    if (bytes_.size() - pos_ < n)
      throw FormatError(field, "truncated at byte " + std::to_string(pos_) + " (needs " +
                                   std::to_string(n) + " bytes)");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_weights(const WeightStore& store) {
  std::vector<std::uint8_t> out{'S', 'T', 'P', 'W'};
  put_u32(out, kWeightFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(store.size()));
  for (const auto& [name, t] : store.entries()) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out.insert(out.end(), name.begin(), name.end());
    put_u32(out, static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.dims()) put_u32(out, static_cast<std::uint32_t>(d));
    for (float v : t.data()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

WeightStore parse_weights(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  auto magic = r.take(4, "magic");
  if (std::memcmp(magic.data(), "STPW", 4) != 0) throw FormatError("magic", "not an STPW file");
  const std::uint32_t version = r.u32("version");
  if (version != kWeightFormatVersion)
    throw FormatError("version", "unsupported format version " + std::to_string(version));
  const std::uint32_t count = r.u32("entry count");
  WeightStore store;
  for (std::uint32_t e = 0; e < count; ++e) {
    const std::string where = "entry " + std::to_string(e) + " ";
    const std::uint32_t name_len = r.u32(where + "name length");
    auto name_bytes = r.take(name_len, where + "name");
    std::string name(name_bytes.begin(), name_bytes.end());
    if (store.contains(name)) throw FormatError(where + "name", "duplicate entry '" + name + "'");
    const std::uint32_t rank = r.u32(where + "rank");
    if (rank == 0) throw FormatError(where + "rank", "rank must be positive");
    Dims dims;
    std::uint64_t count_elems = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
      const std::uint32_t d = r.u32(where + "dims");
      if (d == 0) throw FormatError(where + "dims", "zero extent");
      dims.push_back(d);
      count_elems *= d;
      if (count_elems > bytes.size()) throw FormatError(where + "data", "truncated tensor data");
    }
    std::vector<float> data(count_elems);
    for (auto& v : data) v = std::bit_cast<float>(r.u32(where + "data"));
    store.set(name, Tensor(std::move(dims), std::move(data)));
  }
  if (!r.at_end())
    throw FormatError("trailer", "unexpected bytes after entry " + std::to_string(count));
  return store;
}

void save_weights(const WeightStore& store, const std::filesystem::path& path) {
  const auto bytes = serialize_weights(store);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

WeightStore load_weights(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return parse_weights(bytes);
}

}  // namespace stim
