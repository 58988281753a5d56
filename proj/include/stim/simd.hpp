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
#include <string_view>

// Row kernels behind the spatial operators. Every variant must produce
// results bitwise identical to the scalar reference: products of two floats
// are exact in double, so fused and unfused accumulation agree as long as the
// per-element summation order is the same.

namespace stim::simd {

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  const char* name;
  // acc[i] += w * x[i], accumulated in double.
  void (*axpy_widen)(double* acc, const float* x, double w, std::size_t n);
  // acc[i] = x[i] > acc[i] ? x[i] : acc[i]
  void (*max_inplace)(float* acc, const float* x, std::size_t n);
  // dst[i] = float(src[i]), round to nearest.
  void (*narrow)(float* dst, const double* src, std::size_t n);
};

const KernelTable& scalar_kernels();

/// AVX2+FMA table, or nullptr when not compiled in or unsupported by this CPU.
const KernelTable* avx2_kernels();

/// The table operators dispatch through. Chosen once from CPU features;
/// the STIM_SIMD environment variable ("scalar" or "avx2") overrides.
const KernelTable& active_kernels();

/// Resolves an ISA name; nullptr when unknown or unavailable.
const KernelTable* kernels_for(std::string_view name);

/// Pins dispatch to `table` for the lifetime of the guard. Test use only;
/// not safe while other threads run operators.
class ScopedKernels {
 public:
  explicit ScopedKernels(const KernelTable& table);
  ~ScopedKernels();
  ScopedKernels(const ScopedKernels&) = delete;
  ScopedKernels& operator=(const ScopedKernels&) = delete;

 private:
  const KernelTable* previous_;
};

namespace detail {
const KernelTable& avx2_table();
bool cpu_supports_avx2();
}  // namespace detail

}  // namespace stim::simd
