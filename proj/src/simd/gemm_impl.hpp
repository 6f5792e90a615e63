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

// Loop nests shared by the scalar and AVX2 translation units. Each TU
// includes this inside its own anonymous namespace so that instantiations
// compiled with different target flags never merge at link time.

#include <cstddef>

template <typename Ops>
struct GemmLoops {
  static void nn(const double* a, const double* b, double* c, std::size_t m,
                 std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
      double* crow = c + i * n;
      const double* arow = a + i * k;
      for (std::size_t p = 0; p < k; ++p) {
        const double s = arow[p];
        if (s != 0.0) Ops::axpy(s, b + p * n, crow, n);
      }
    }
  }

  static void nt(const double* a, const double* b, double* c, std::size_t m,
                 std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
      const double* arow = a + i * k;
      double* crow = c + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += Ops::dot(arow, b + j * k, k);
    }
  }

  static void tn(const double* a, const double* b, double* c, std::size_t m,
                 std::size_t k, std::size_t n) {
    for (std::size_t p = 0; p < k; ++p) {
      const double* arow = a + p * m;
      const double* brow = b + p * n;
      for (std::size_t i = 0; i < m; ++i) {
        const double s = arow[i];
        if (s != 0.0) Ops::axpy(s, brow, c + i * n, n);
      }
    }
  }
};
