// Copyright 2026 The hetgl Authors
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
#include <string_view>

#include "hetgl/simd/kernels.hpp"

namespace hetgl::simd {

#if !defined(HETGL_HAVE_AVX2)
const KernelTable* avx2_kernels() { return nullptr; }
#endif

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

bool cpu_supports_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const KernelTable* select_default() {
  if (const char* env = std::getenv("HETGL_FORCE_SCALAR");
      env != nullptr && std::string_view(env) != "0") {
    return &scalar_kernels();
  }
  if (const KernelTable* t = avx2_kernels(); t != nullptr && cpu_supports_avx2())
    return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{select_default()};
  return slot;
}

}  // namespace

const KernelTable& active_kernels() {
  return *active_slot().load(std::memory_order_relaxed);
}

bool force_isa(Isa isa) {
  if (isa == Isa::kAvx2) {
    const KernelTable* t = avx2_kernels();
    if (t == nullptr || !cpu_supports_avx2()) {
      active_slot().store(&scalar_kernels());
      return false;
    }
    active_slot().store(t);
    return true;
  }
  active_slot().store(&scalar_kernels());
  return true;
}

}  // namespace hetgl::simd
