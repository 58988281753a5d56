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

#include <string>

#include "oracles.hpp"
#include "stim/error.hpp"
#include "stim/image.hpp"

namespace stim {
namespace {

std::vector<std::uint8_t> ppm(const std::string& header, std::size_t pixels, std::uint8_t value) {
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), 3 * pixels, value);
  return out;
}

TEST(Ppm, FullScaleMapsToPlusMinusOne) {
  const Tensor white = decode_ppm(ppm("P6\n2 2\n255\n", 4, 255));
  EXPECT_EQ(white.dims(), (Dims{3, 2, 2}));
  for (float v : white.data()) EXPECT_EQ(v, 1.0f);
  const Tensor black = decode_ppm(ppm("P6 2 2 255\n", 4, 0));
  for (float v : black.data()) EXPECT_EQ(v, -1.0f);
}

TEST(Ppm, InterleavedChannelsAndComments) {
  const std::string head = "P6\n# made by hand\n2 1\n# max\n255\n";
  std::vector<std::uint8_t> bytes(head.begin(), head.end());
  for (std::uint8_t v : {0, 51, 102, 153, 204, 255}) bytes.push_back(v);
  const Tensor t = decode_ppm(bytes);
  EXPECT_EQ(t.dims(), (Dims{3, 1, 2}));
  EXPECT_EQ(t.at(0, 0, 0), byte_to_unit(0));
  EXPECT_EQ(t.at(1, 0, 0), byte_to_unit(51));
  EXPECT_EQ(t.at(2, 0, 0), byte_to_unit(102));
  EXPECT_EQ(t.at(0, 0, 1), byte_to_unit(153));
}

TEST(Ppm, EncodeDecodeRoundTripIsExact) {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t h = 1 + rng.below(9), w = 1 + rng.below(9);
    Tensor img({3, h, w});
    for (auto& v : img.data()) v = byte_to_unit(static_cast<std::uint8_t>(rng.below(256)));
    const auto bytes = encode_ppm(img);
    EXPECT_EQ(decode_ppm(bytes), img);
    EXPECT_EQ(encode_ppm(decode_ppm(bytes)), bytes);
  }
}

TEST(Ppm, ByteMappingInvertsOnGrid) {
  for (int b = 0; b < 256; ++b) EXPECT_EQ(unit_to_byte(byte_to_unit(static_cast<std::uint8_t>(b))), b);
  EXPECT_EQ(unit_to_byte(3.0f), 255);
  EXPECT_EQ(unit_to_byte(-3.0f), 0);
}

TEST(Ppm, ErrorsCarryByteOffsets) {
  try {
    decode_ppm(ppm("P5\n2 2\n255\n", 4, 0));
    FAIL();
  } catch (const DecodeError& e) {
    EXPECT_EQ(e.offset(), 0u);
  }
  const auto good = ppm("P6\n2 2\n255\n", 4, 7);
  const std::vector<std::uint8_t> cut(good.begin(), good.end() - 1);
  try {
    decode_ppm(cut);
    FAIL();
  } catch (const DecodeError& e) {
    EXPECT_EQ(e.offset(), cut.size());
  }
  try {
    decode_ppm(ppm("P6\n2 2\n65535\n", 4, 0));
    FAIL();
  } catch (const DecodeError& e) {
    EXPECT_EQ(e.offset(), 7u);
  }
  EXPECT_THROW(decode_ppm(ppm("P6\n2 x\n255\n", 4, 0)), DecodeError);
  EXPECT_THROW(decode_ppm(ppm("P6\n2", 0, 0)), DecodeError);
  EXPECT_THROW(decode_ppm(std::vector<std::uint8_t>{}), DecodeError);
}

TEST(Pgm, WritesScaledGrayscale) {
  const Tensor map({1, 1, 3}, {0.0f, 0.5f, 1.0f});
  const auto bytes = encode_pgm(map);
  const std::string head = "P5\n3 1\n255\n";
  ASSERT_EQ(bytes.size(), head.size() + 3);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + static_cast<long>(head.size())), head);
  EXPECT_EQ(bytes[head.size()], 0);
  EXPECT_EQ(bytes[head.size() + 1], 128);
  EXPECT_EQ(bytes[head.size() + 2], 255);
  EXPECT_THROW(encode_pgm(Tensor({2, 2, 2})), InvalidArgument);
}

TEST(Quantize, Idempotent) {
  Rng rng(3);
  const Tensor x = oracle::random_tensor(rng, {3, 4, 4}, -1.2, 1.2);
  const Tensor q = quantize(x);
  EXPECT_EQ(quantize(q), q);
}

}  // namespace
}  // namespace stim
