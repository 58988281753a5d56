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

// Compiled with -mavx2 -mfma. Nothing here may run before the dispatcher
// has confirmed CPU support.

#include <immintrin.h>

#include "stim/simd.hpp"

namespace stim::simd {
namespace {

// Separate multiply and add: a fused multiply-add rounds once and would drift
// from the scalar table.
void axpy_widen(double* acc, const float* x, double w, std::size_t n) {
  const __m256d wv = _mm256_set1_pd(w);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 xf = _mm256_loadu_ps(x + i);
    const __m256d lo = _mm256_cvtps_pd(_mm256_castps256_ps128(xf));
    const __m256d hi = _mm256_cvtps_pd(_mm256_extractf128_ps(xf, 1));
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_mul_pd(wv, lo)));
    _mm256_storeu_pd(acc + i + 4, _mm256_add_pd(_mm256_loadu_pd(acc + i + 4), _mm256_mul_pd(wv, hi)));
  }
  if (i + 4 <= n) {
    const __m256d lo = _mm256_cvtps_pd(_mm_loadu_ps(x + i));
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_mul_pd(wv, lo)));
    i += 4;
  }
  for (; i < n; ++i) acc[i] += w * static_cast<double>(x[i]);
}

void max_inplace(float* acc, const float* x, std::size_t n) {
  std::size_t i = 0;
  // _mm256_max_ps(a, b) yields a > b ? a : b, matching the scalar operand order.
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(acc + i, _mm256_max_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(acc + i)));
  for (; i < n; ++i) acc[i] = x[i] > acc[i] ? x[i] : acc[i];
}

void narrow(float* dst, const double* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm_storeu_ps(dst + i, _mm256_cvtpd_ps(_mm256_loadu_pd(src + i)));
  for (; i < n; ++i) dst[i] = static_cast<float>(src[i]);
}

constexpr KernelTable kAvx2{Isa::avx2, "avx2", &axpy_widen, &max_inplace, &narrow};

}  // namespace

namespace detail {
const KernelTable& avx2_table() { return kAvx2; }
}  // namespace detail

}  // namespace stim::simd
