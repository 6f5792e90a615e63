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

#include <cstdlib>
#include <random>
#include <vector>

#include "gradcheck.hpp"
#include "gtest/gtest.h"
#include "hetgl/engine/ops.hpp"
#include "hetgl/simd/kernels.hpp"

namespace hetgl::simd {
namespace {

std::vector<double> randv(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

double max_rel(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, testing::rel_error(a[i], b[i], 1e-12));
  return worst;
}

class Avx2Equivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    if (avx2_kernels() == nullptr || !cpu_supports_avx2()) GTEST_SKIP() << "no AVX2 on this host";
  }
  const KernelTable& s = scalar_kernels();
  const KernelTable& v = *avx2_kernels();
  std::mt19937_64 rng{99};
};

TEST_F(Avx2Equivalence, DotAndAxpy) {
  for (std::size_t n : {0, 1, 3, 4, 7, 8, 15, 16, 17, 63, 100}) {
    auto x = randv(n, rng), y = randv(n, rng);
    EXPECT_NEAR(s.dot(x.data(), y.data(), n), v.dot(x.data(), y.data(), n), 1e-12) << n;
    auto ys = y, yv = y;
    s.axpy(0.37, x.data(), ys.data(), n);
    v.axpy(0.37, x.data(), yv.data(), n);
    EXPECT_LT(max_rel(ys, yv), 1e-12) << n;
  }
}

TEST_F(Avx2Equivalence, GemmVariantsAccumulate) {
  const std::size_t shapes[][3] = {{1, 1, 1}, {3, 5, 7}, {4, 4, 4}, {9, 13, 6}, {17, 33, 5}, {64, 64, 64}};
  for (const auto& sh : shapes) {
    const std::size_t m = sh[0], k = sh[1], n = sh[2];
    auto a = randv(m * k, rng), b = randv(k * n, rng), bt = randv(n * k, rng), at = randv(k * m, rng);
    auto c0 = randv(m * n, rng);
    auto cs = c0, cv = c0;
    s.gemm_nn(a.data(), b.data(), cs.data(), m, k, n);
    v.gemm_nn(a.data(), b.data(), cv.data(), m, k, n);
    EXPECT_LT(max_rel(cs, cv), 1e-12);
    cs = cv = c0;
    s.gemm_nt(a.data(), bt.data(), cs.data(), m, k, n);
    v.gemm_nt(a.data(), bt.data(), cv.data(), m, k, n);
    EXPECT_LT(max_rel(cs, cv), 1e-12);
    cs = cv = c0;
    s.gemm_tn(at.data(), b.data(), cs.data(), m, k, n);
    v.gemm_tn(at.data(), b.data(), cv.data(), m, k, n);
    EXPECT_LT(max_rel(cs, cv), 1e-12);
  }
}

TEST(ScalarKernels, GemmMatchesNaiveLoops) {
  std::mt19937_64 rng(5);
  const std::size_t m = 3, k = 4, n = 2;
  auto a = randv(m * k, rng), b = randv(k * n, rng);
  std::vector<double> c(m * n, 1.0), ref(m * n, 1.0);
  scalar_kernels().gemm_nn(a.data(), b.data(), c.data(), m, k, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t p = 0; p < k; ++p) ref[i * n + j] += a[i * k + p] * b[p * n + j];
  EXPECT_LT(max_rel(c, ref), 1e-14);
}

TEST(Dispatch, ForcingScalarIsHonoured) {
  const Isa before = active_kernels().isa;
  EXPECT_TRUE(force_isa(Isa::kScalar));
  EXPECT_EQ(active_kernels().isa, Isa::kScalar);
  force_isa(before);
}

TEST(Dispatch, EngineResultsAgreeAcrossIsas) {
  if (avx2_kernels() == nullptr || !cpu_supports_avx2()) GTEST_SKIP();
  std::mt19937_64 rng(8);
  Tensor a = testing::random_tensor(20, 30, rng), b = testing::random_tensor(30, 10, rng);
  const Isa before = active_kernels().isa;
  auto run = [&] {
    Tape t;
    return ops::matmul(t.constant(a), t.constant(b)).value();
  };
  force_isa(Isa::kScalar);
  Tensor s = run();
  force_isa(Isa::kAvx2);
  Tensor v = run();
  force_isa(before);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(s[i], v[i], 1e-12);
}

}  // namespace
}  // namespace hetgl::simd
