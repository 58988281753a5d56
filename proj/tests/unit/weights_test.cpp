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

#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <filesystem>
#include <limits>

#include "oracles.hpp"
#include "stim/error.hpp"
#include "stim/weights.hpp"

namespace stim {
namespace {

WeightStore random_store(Rng& rng) {
  WeightStore s;
  const std::size_t n = rng.below(6);
  for (std::size_t i = 0; i < n; ++i) {
    Dims dims(1 + rng.below(4));
    for (auto& d : dims) d = 1 + rng.below(4);
    Tensor t(dims);
    // Arbitrary bit patterns, including NaN payloads, infinities and -0.
    for (auto& v : t.data()) v = std::bit_cast<float>(static_cast<std::uint32_t>(rng.bits()));
    std::string name = "layer" + std::to_string(rng.below(1000)) + ".w";
    if (rng.below(4) == 0) name += "\xc3\xa9";  // non-ASCII UTF-8
    s.set(name, std::move(t));
  }
  return s;
}

std::uint32_t read_u32(const std::vector<std::uint8_t>& b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | static_cast<std::uint32_t>(b[at + 1]) << 8 |
         static_cast<std::uint32_t>(b[at + 2]) << 16 | static_cast<std::uint32_t>(b[at + 3]) << 24;
}

TEST(WeightFormat, EmptyStoreIsTwelveByteHeader) {
  const auto bytes = serialize_weights(WeightStore{});
  ASSERT_EQ(bytes.size(), 12u);
  EXPECT_EQ(std::memcmp(bytes.data(), "STPW", 4), 0);
  EXPECT_EQ(read_u32(bytes, 4), 1u);
  EXPECT_EQ(read_u32(bytes, 8), 0u);
  EXPECT_EQ(parse_weights(bytes).size(), 0u);
}

TEST(WeightFormat, SingleTensorByteAccounting) {
  WeightStore s;
  s.set("w", Tensor({2, 2}, {1.0f, -2.0f, 0.5f, 3.0f}));
  const auto bytes = serialize_weights(s);
  // header 12 | name length 4 + name 1 | rank 4 | dims 2*4 | data 4*4
  EXPECT_EQ(bytes.size(), 12u + 4u + 1u + 4u + 8u + 16u);
  EXPECT_EQ(read_u32(bytes, 12), 1u);
  EXPECT_EQ(bytes[16], 'w');
  EXPECT_EQ(read_u32(bytes, 17), 2u);
  EXPECT_EQ(read_u32(bytes, 21), 2u);
  EXPECT_EQ(read_u32(bytes, 25), 2u);
  EXPECT_EQ(read_u32(bytes, 29), std::bit_cast<std::uint32_t>(1.0f));
  EXPECT_EQ(read_u32(bytes, 33), std::bit_cast<std::uint32_t>(-2.0f));
}

TEST(WeightFormat, RandomStoresRoundTripBitwise) {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const WeightStore s = random_store(rng);
    const WeightStore back = parse_weights(serialize_weights(s));
    ASSERT_TRUE(back == s) << "trial " << trial;
    ASSERT_EQ(serialize_weights(back), serialize_weights(s));
  }
}

TEST(WeightFormat, SaveLoadFile) {
  Rng rng(5);
  WeightStore s = random_store(rng);
  s.set("extra", Tensor({3}, 0.25f));
  const auto path = std::filesystem::temp_directory_path() / "stim_weights_test.stpw";
  save_weights(s, path);
  EXPECT_TRUE(load_weights(path) == s);
  std::filesystem::remove(path);
  EXPECT_THROW(load_weights(path), std::runtime_error);
}

TEST(WeightFormat, CorruptMagicVersionAndTruncation) {
  WeightStore s;
  s.set("a", Tensor({2, 3}, 1.0f));
  s.set("b", Tensor({4}, 2.0f));
  const auto good = serialize_weights(s);

  auto bad = good;
  bad[0] = 'X';
  try {
    parse_weights(bad);
    FAIL() << "corrupt magic accepted";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.field(), "magic");
  }

  bad = good;
  bad[4] = 2;
  try {
    parse_weights(bad);
    FAIL() << "unknown version accepted";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.field(), "version");
  }

  for (std::size_t n = 0; n < good.size(); ++n) {
    const std::vector<std::uint8_t> cut(good.begin(), good.begin() + static_cast<long>(n));
    EXPECT_THROW(parse_weights(cut), FormatError) << "prefix " << n;
  }
  auto longer = good;
  longer.push_back(0);
  EXPECT_THROW(parse_weights(longer), FormatError);
}

TEST(WeightStoreApi, GetMissingThrowsAndMergeReplaces) {
  WeightStore a, b;
  a.set("x", Tensor({1}, 1.0f));
  b.set("x", Tensor({1}, 2.0f));
  b.set("y", Tensor({1}, 3.0f));
  EXPECT_THROW(a.get("y"), WeightNotFound);
  a.merge(b);
  EXPECT_EQ(a.size(), 2u);
  EXPECT_EQ(a.get("x")[0], 2.0f);
}

TEST(WeightStoreApi, EqualityIsBitwise) {
  WeightStore a, b;
  a.set("n", Tensor({1}, std::numeric_limits<float>::quiet_NaN()));
  b.set("n", Tensor({1}, std::numeric_limits<float>::quiet_NaN()));
  EXPECT_TRUE(a == b);
  a.set("z", Tensor({1}, 0.0f));
  b.set("z", Tensor({1}, -0.0f));
  EXPECT_FALSE(a == b);
}

}  // namespace
}  // namespace stim
