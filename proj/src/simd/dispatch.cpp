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

#include <atomic>
#include <cstdlib>
#include <string>

#include "stim/simd.hpp"

namespace stim::simd {

namespace detail {
bool cpu_supports_avx2() {
#if defined(STIM_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}
}  // namespace detail

#ifndef STIM_HAVE_AVX2
namespace detail {
// Never returned to callers when AVX2 is compiled out.
const KernelTable& avx2_table() { return scalar_kernels(); }
}  // namespace detail
#endif

const KernelTable* avx2_kernels() {
  static const bool ok = detail::cpu_supports_avx2();
  return ok ? &detail::avx2_table() : nullptr;
}

const KernelTable* kernels_for(std::string_view name) {
  if (name == "scalar") return &scalar_kernels();
  if (name == "avx2") return avx2_kernels();
  return nullptr;
}

namespace {

const KernelTable* select_default() {
  if (const char* env = std::getenv("STIM_SIMD")) {
    if (const KernelTable* t = kernels_for(env)) return t;
  }
  if (const KernelTable* t = avx2_kernels()) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*> g_override{nullptr};

}  // namespace

const KernelTable& active_kernels() {
  if (const KernelTable* o = g_override.load(std::memory_order_acquire)) return *o;
  static const KernelTable* chosen = select_default();
  return *chosen;
}

ScopedKernels::ScopedKernels(const KernelTable& table)
    : previous_(g_override.exchange(&table, std::memory_order_acq_rel)) {}

ScopedKernels::~ScopedKernels() { g_override.store(previous_, std::memory_order_release); }

}  // namespace stim::simd
