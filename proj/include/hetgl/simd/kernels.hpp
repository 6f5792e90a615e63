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

#pragma once

// Dense double-precision inner-loop kernels.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant compiled in its own translation unit. The variant is
// chosen once at runtime from CPUID; HETGL_FORCE_SCALAR=1 in the
// environment pins the scalar path.
//
// All matrices are row-major and contiguous. The gemm kernels accumulate
// into C (C += ...), they never overwrite it.

#include <cstddef>
#include <span>
#include <string_view>

namespace hetgl::simd {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // C(m×n) += A(m×k) · B(k×n)
  void (*gemm_nn)(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t k, std::size_t n);
  // C(m×n) += A(m×k) · B(n×k)ᵀ
  void (*gemm_nt)(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t k, std::size_t n);
  // C(m×n) += A(k×m)ᵀ · B(k×n)
  void (*gemm_tn)(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t k, std::size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when the binary was built without the AVX2 translation unit.
const KernelTable* avx2_kernels();

bool cpu_supports_avx2();

// The table every engine op dispatches through.
const KernelTable& active_kernels();

// Overrides the runtime choice. Requesting kAvx2 on a CPU without it
// leaves the scalar table active and returns false.
bool force_isa(Isa isa);

inline double dot(std::span<const double> x, std::span<const double> y) {
  return active_kernels().dot(x.data(), y.data(), x.size());
}

inline void axpy(double alpha, std::span<const double> x,
                 std::span<double> y) {
  active_kernels().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace hetgl::simd
