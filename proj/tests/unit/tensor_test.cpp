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

#include <limits>

#include "stim/error.hpp"
#include "stim/tensor.hpp"

namespace stim {
namespace {

TEST(Tensor, FillConstructorSetsEveryElement) {
  const Tensor t({2, 3, 4}, 1.5f);
  EXPECT_EQ(t.size(), 24u);
  EXPECT_EQ(t.channels(), 2u);
  EXPECT_EQ(t.height(), 3u);
  EXPECT_EQ(t.width(), 4u);
  for (float v : t.data()) EXPECT_EQ(v, 1.5f);
}

TEST(Tensor, RejectsZeroDimsAndLengthMismatch) {
  EXPECT_THROW(Tensor({2, 0, 3}), InvalidArgument);
  EXPECT_THROW(Tensor({2, 2}, std::vector<float>(3)), InvalidArgument);
}

TEST(Tensor, RowMajorIndexing) {
  std::vector<float> data(2 * 3 * 4);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<float>(i);
  const Tensor t({2, 3, 4}, data);
  EXPECT_EQ(t.at(1, 2, 3), 23.0f);
  EXPECT_EQ(t.at(0, 1, 0), 4.0f);
  EXPECT_EQ(t.plane(1)[0], 12.0f);
  EXPECT_EQ(t.planes(), 2u);
}

TEST(Tensor, ReshapeKeepsDataAndChecksCount) {
  const Tensor t({2, 6}, 3.0f);
  const Tensor r = t.reshaped({3, 4});
  EXPECT_EQ(r.dims(), (Dims{3, 4}));
  EXPECT_THROW(t.reshaped({5, 2}), InvalidArgument);
}

TEST(Tensor, MaxAbsDiffAndEquality) {
  Tensor a({2, 2}, 0.0f), b({2, 2}, 0.0f);
  EXPECT_TRUE(a == b);
  b[3] = -0.25f;
  EXPECT_FALSE(a == b);
  EXPECT_DOUBLE_EQ(max_abs_diff(a, b), 0.25);
  EXPECT_THROW(max_abs_diff(a, Tensor({4}, 0.0f)), InvalidArgument);
}

TEST(Tensor, FiniteCheck) {
  Tensor t({3}, 1.0f);
  EXPECT_TRUE(t.all_finite());
  t[1] = std::numeric_limits<float>::quiet_NaN();
  EXPECT_FALSE(t.all_finite());
}

TEST(Tensor, DimsToString) { EXPECT_EQ(to_string(Dims{3, 8, 8}), "[3x8x8]"); }

}  // namespace
}  // namespace stim
