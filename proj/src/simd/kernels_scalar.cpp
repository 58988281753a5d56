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

#include "stim/simd.hpp"

namespace stim::simd {
namespace {

void axpy_widen(double* acc, const float* x, double w, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += w * static_cast<double>(x[i]);
}

void max_inplace(float* acc, const float* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] = x[i] > acc[i] ? x[i] : acc[i];
}

void narrow(float* dst, const double* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = static_cast<float>(src[i]);
}

constexpr KernelTable kScalar{Isa::scalar, "scalar", &axpy_widen, &max_inplace, &narrow};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace stim::simd
