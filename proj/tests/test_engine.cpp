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

#include <cmath>
#include <random>

#include "gradcheck.hpp"
#include "gtest/gtest.h"
#include "hetgl/engine/ops.hpp"
#include "hetgl/engine/optim.hpp"
#include "hetgl/errors.hpp"

namespace hetgl {
namespace {

using testing::max_grad_error;
using testing::random_tensor;

constexpr double kTol = 1e-4;

TEST(Tensor, RejectsMismatchedData) {
  EXPECT_THROW(Tensor(2, 2, std::vector<double>{1, 2, 3}), ShapeError);
  EXPECT_THROW(Tensor(1, 2).item(), ShapeError);
}

TEST(Ops, IdentityMatmul) {
  Tape t;
  Tensor x = Tensor::from_rows({{1, 2, 3}, {4, 5, 6}});
  Var y = ops::matmul(t.constant(Tensor::identity(2)), t.constant(x));
  EXPECT_EQ(y.value(), x);
}

TEST(Ops, Relu) {
  Tape t;
  EXPECT_EQ(ops::relu(t.constant(Tensor::from_rows({{-1, 2}}))).value(),
            Tensor::from_rows({{0, 2}}));
}

TEST(Ops, GatherRows) {
  Tape t;
  const std::size_t idx[] = {2, 0};
  Var g = ops::gather_rows(t.constant(Tensor::from_rows({{1, 2}, {3, 4}, {5, 6}})), idx);
  EXPECT_EQ(g.value(), Tensor::from_rows({{5, 6}, {1, 2}}));
}

TEST(Ops, ShapeErrorsQuoteBothShapes) {
  Tape t;
  Var a = t.constant(Tensor(2, 3));
  Var b = t.constant(Tensor(2, 2));
  try {
    ops::matmul(a, b);
    FAIL();
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("2x3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("2x2"), std::string::npos) << msg;
  }
  EXPECT_THROW(ops::add(a, b), ShapeError);
}

TEST(Backward, SumOfSquares) {
  Tape t;
  Var x = t.variable(Tensor::from_rows({{1, 2, 3}}));
  t.backward(ops::sum(ops::square(x)));
  EXPECT_EQ(x.grad(), Tensor::from_rows({{2, 4, 6}}));
}

TEST(Backward, LinearMapGivesTransposeTimesOnes) {
  Tape t;
  Tensor a = Tensor::from_rows({{1, 2}, {3, 4}, {5, 6}});
  Var x = t.variable(Tensor(2, 1, 0.5));
  t.backward(ops::sum(ops::matmul(t.constant(a), x)));
  EXPECT_EQ(x.grad(), Tensor::from_rows({{9}, {12}}));
}

TEST(Backward, NonScalarLossIsAContractError) {
  Tape t;
  Var x = t.variable(Tensor(2, 1, 1.0));
  EXPECT_THROW(t.backward(x), ContractError);
}

TEST(Backward, ReusedTensorAccumulatesBothPaths) {
  // f = sum(x*x + 3x) -> 2x + 3
  Tape t;
  Var x = t.variable(Tensor::from_rows({{1, -2}}));
  t.backward(ops::sum(ops::add(ops::mul(x, x), ops::scale(x, 3))));
  EXPECT_EQ(x.grad(), Tensor::from_rows({{5, -1}}));
}

TEST(Backward, ConstantsRecordNoBackward) {
  Tape t;
  Var c = t.constant(Tensor(1, 1, 2.0));
  Var y = ops::square(c);
  EXPECT_FALSE(y.requires_grad());
}

class OpGradient : public ::testing::Test {
 protected:
  std::mt19937_64 rng{7};
  Tensor r(std::size_t m, std::size_t n) { return random_tensor(m, n, rng); }
  Tensor pos(std::size_t m, std::size_t n) { return random_tensor(m, n, rng, 0.5, 2.0); }
};

TEST_F(OpGradient, Matmuls) {
  EXPECT_LT(max_grad_error({r(3, 4), r(4, 2)},
                           [](Tape&, const auto& v) { return ops::sum(ops::square(ops::matmul(v[0], v[1]))); }),
            kTol);
  EXPECT_LT(max_grad_error({r(3, 4), r(5, 4)},
                           [](Tape&, const auto& v) { return ops::sum(ops::square(ops::matmul_nt(v[0], v[1]))); }),
            kTol);
  EXPECT_LT(max_grad_error({r(3, 4)},
                           [](Tape&, const auto& v) { return ops::sum(ops::square(ops::transpose(v[0]))); }),
            kTol);
}

TEST_F(OpGradient, Elementwise) {
  auto check = [&](auto fn, Tensor a, Tensor b) {
    return max_grad_error({a, b}, [fn](Tape&, const auto& v) { return ops::sum(ops::square(fn(v[0], v[1]))); });
  };
  EXPECT_LT(check([](Var a, Var b) { return ops::add(a, b); }, r(2, 3), r(2, 3)), kTol);
  EXPECT_LT(check([](Var a, Var b) { return ops::sub(a, b); }, r(2, 3), r(2, 3)), kTol);
  EXPECT_LT(check([](Var a, Var b) { return ops::mul(a, b); }, r(2, 3), r(2, 3)), kTol);
  EXPECT_LT(check([](Var a, Var b) { return ops::div(a, b); }, r(2, 3), pos(2, 3)), kTol);
  EXPECT_LT(check([](Var a, Var b) { return ops::concat_cols(a, b); }, r(2, 3), r(2, 1)), kTol);
  EXPECT_LT(check([](Var a, Var b) { return ops::add_row_vector(a, b); }, r(3, 2), r(1, 2)), kTol);
  EXPECT_LT(check([](Var a, Var b) { return ops::mul_row_vector(a, b); }, r(3, 2), r(1, 2)), kTol);
  EXPECT_LT(check([](Var a, Var b) { return ops::mul_col_vector(a, b); }, r(3, 2), r(3, 1)), kTol);
  EXPECT_LT(check([](Var a, Var b) { return ops::outer_sum(a, b); }, r(3, 1), r(4, 1)), kTol);
}

TEST_F(OpGradient, Unary) {
  auto check = [&](auto fn, Tensor a) {
    return max_grad_error({a}, [fn](Tape&, const auto& v) { return ops::sum(ops::square(fn(v[0]))); });
  };
  Tensor away = Tensor::from_rows({{-1.5, 0.7}, {2.0, -0.3}});
  EXPECT_LT(check([](Var a) { return ops::scale(a, -2.5); }, r(2, 2)), kTol);
  EXPECT_LT(check([](Var a) { return ops::add_scalar(a, 0.5); }, r(2, 2)), kTol);
  EXPECT_LT(check([](Var a) { return ops::relu(a); }, away), kTol);
  EXPECT_LT(check([](Var a) { return ops::clamp(a, -1.0, 1.0); }, away), kTol);
  EXPECT_LT(check([](Var a) { return ops::floor_at(a, 0.0); }, away), kTol);
  EXPECT_LT(check([](Var a) { return ops::sqrt(a); }, pos(2, 2)), kTol);
  EXPECT_LT(check([](Var a) { return ops::log(a); }, pos(2, 2)), kTol);
  EXPECT_LT(check([](Var a) { return ops::square(a); }, r(2, 2)), kTol);
  EXPECT_LT(check([](Var a) { return ops::safe_reciprocal(a); }, pos(2, 2)), kTol);
  EXPECT_LT(check([](Var a) { return ops::sum_rows(a); }, r(3, 2)), kTol);
  EXPECT_LT(check([](Var a) { return ops::sum_cols(a); }, r(3, 2)), kTol);
  EXPECT_LT(check([](Var a) { return ops::row_norms(a); }, r(3, 2)), kTol);
  EXPECT_LT(check([](Var a) { return ops::frobenius_norm(a); }, r(3, 2)), kTol);
  EXPECT_LT(check([](Var a) { return ops::mean(a); }, r(3, 2)), kTol);
  EXPECT_LT(check([](Var a) { return ops::slice_rows(a, 1, 3); }, r(4, 2)), kTol);
  EXPECT_LT(check([](Var a) {
              const std::size_t idx[] = {2, 0, 2};
              return ops::gather_rows(a, idx);
            }, r(3, 2)), kTol);
  EXPECT_LT(check([](Var a) { return ops::mul_constant(a, Tensor::from_rows({{1, 0}, {2, -1}})); }, r(2, 2)), kTol);
}

TEST_F(OpGradient, Spmm) {
  auto s = std::make_shared<SparseRows>();
  s->cols = 4;
  s->push(0, 0.5);
  s->push(3, 2.0);
  s->end_row();
  s->end_row();
  s->push(1, -1.0);
  s->end_row();
  EXPECT_LT(max_grad_error({r(4, 3)},
                           [s](Tape&, const auto& v) { return ops::sum(ops::square(ops::spmm(s, v[0]))); }),
            kTol);
  Tape t;
  Var y = ops::spmm(s, t.constant(Tensor::from_rows({{1, 1}, {2, 2}, {3, 3}, {4, 4}})));
  EXPECT_EQ(y.value(), Tensor::from_rows({{8.5, 8.5}, {0, 0}, {-2, -2}}));
}

TEST_F(OpGradient, TwoLayerMlp) {
  Tensor x = r(5, 3);
  EXPECT_LT(max_grad_error({r(4, 3), r(1, 4), r(1, 4), r(1, 1)},
                           [x](Tape& t, const auto& v) {
                             Var h = ops::relu(ops::add_row_vector(ops::matmul_nt(t.constant(x), v[0]), v[1]));
                             Var out = ops::add_row_vector(ops::matmul_nt(h, v[2]), v[3]);
                             return ops::mean(ops::square(out));
                           }),
            kTol);
}

TEST(Ops, RowNormsAndReciprocalAtZero) {
  Tape t;
  Var x = t.variable(Tensor::from_rows({{0, 0}, {3, 4}}));
  Var n = ops::row_norms(x);
  EXPECT_EQ(n.value(), Tensor::from_rows({{0}, {5}}));
  Var inv = ops::safe_reciprocal(n);
  EXPECT_EQ(inv.value()[0], 0.0);
  t.backward(ops::sum(ops::add(n, inv)));
  EXPECT_EQ(x.grad()(0, 0), 0.0);
  EXPECT_TRUE(std::isfinite(x.grad()(1, 0)));
  Tape t2;
  Var z = t2.variable(Tensor(2, 2));
  t2.backward(ops::frobenius_norm(z));
  EXPECT_EQ(z.grad(), Tensor(2, 2));
}

TEST(Dropout, IdentityCases) {
  std::mt19937_64 rng(1);
  Tape t;
  Tensor x = Tensor::from_rows({{1, 2}, {3, 4}});
  EXPECT_EQ(ops::dropout(t.constant(x), 0.0, rng, true).value(), x);
  EXPECT_EQ(ops::dropout(t.constant(x), 0.7, rng, false).value(), x);
  EXPECT_THROW(ops::dropout(t.constant(x), 1.0, rng, true), ContractError);
}

TEST(Dropout, InvertedScalingKeepsTheMean) {
  std::mt19937_64 rng(3);
  Tape t;
  Var y = ops::dropout(t.constant(Tensor(1000, 1000, 1.0)), 0.4, rng, true);
  double sum = 0;
  std::size_t zeros = 0;
  for (double v : y.value().data()) {
    sum += v;
    zeros += v == 0.0;
  }
  EXPECT_NEAR(sum / 1e6, 1.0, 0.01);
  EXPECT_NEAR(static_cast<double>(zeros) / 1e6, 0.4, 0.005);
}

TEST(Init, MomentsAndDeterminism) {
  std::mt19937_64 a(11), b(11), c(12);
  Tensor x = gaussian_init(1000, 1000, a);
  EXPECT_EQ(x, gaussian_init(1000, 1000, b));
  EXPECT_NE(gaussian_init(4, 4, c), gaussian_init(4, 4, a));
  double mean = 0, sq = 0;
  for (double v : x.data()) mean += v;
  mean /= 1e6;
  for (double v : x.data()) sq += (v - mean) * (v - mean);
  EXPECT_LT(std::abs(mean), 1e-4);
  EXPECT_NEAR(std::sqrt(sq / 1e6), 0.01, 0.0002);
}

TEST(Adam, ZeroGradientLeavesParameter) {
  ParamStore ps;
  ps.create("w", Tensor::from_rows({{0.3, -0.2}}));
  ps.zero_grad();
  AdamState adam(ps);
  adam.step(ps, 0.1);
  EXPECT_EQ(ps[0].value, Tensor::from_rows({{0.3, -0.2}}));
}

TEST(Adam, FirstStepMovesByLr) {
  ParamStore ps;
  ps.create("w", Tensor::scalar(1.0));
  ps[0].grad = Tensor::scalar(1.0);
  AdamState adam(ps);
  adam.step(ps, 0.001);
  // m̂ = 1, v̂ = 1 -> Δ = -lr/(1+ε)
  EXPECT_LT(std::abs((ps[0].value.item() - 1.0) + 0.001), 1e-6);
  EXPECT_EQ(adam.steps(), 1);
}

TEST(Adam, MatchesHandRolledRecursion) {
  ParamStore ps;
  ps.create("w", Tensor::scalar(0.5));
  AdamState adam(ps);
  double w = 0.5, m = 0, v = 0;
  const double grads[] = {0.3, -1.2, 0.7};
  for (int t = 1; t <= 3; ++t) {
    const double g = grads[t - 1];
    ps[0].grad = Tensor::scalar(g);
    adam.step(ps, 0.01);
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    const double mh = m / (1 - std::pow(0.9, t)), vh = v / (1 - std::pow(0.999, t));
    w -= 0.01 * mh / (std::sqrt(vh) + 1e-8);
    EXPECT_NEAR(ps[0].value.item(), w, 1e-15);
  }
}

TEST(Adam, IdenticalParamsGetIdenticalUpdates) {
  ParamStore ps;
  ps.create("a", Tensor::from_rows({{0.1, 0.2}}));
  ps.create("b", Tensor::from_rows({{0.1, 0.2}}));
  ps[0].grad = ps[1].grad = Tensor::from_rows({{0.5, -0.25}});
  AdamState adam(ps);
  adam.step(ps, 0.05);
  EXPECT_EQ(ps[0].value, ps[1].value);
}

TEST(Adam, NonFiniteGradientAbortsWithoutUpdating) {
  ParamStore ps;
  ps.create("a", Tensor::scalar(1.0));
  ps.create("b", Tensor::scalar(2.0));
  ps[0].grad = Tensor::scalar(1.0);
  ps[1].grad = Tensor::scalar(std::nan(""));
  AdamState adam(ps);
  try {
    adam.step(ps, 0.1);
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("parameter b"), std::string::npos);
  }
  EXPECT_EQ(ps[0].value.item(), 1.0);
}

TEST(L2, Values) {
  ParamStore ps;
  ps.create("z", Tensor(2, 2));
  EXPECT_EQ(l2_penalty_value(ps), 0.0);
  ps.create("w", Tensor::from_rows({{3, 4}}));
  EXPECT_EQ(l2_penalty_value(ps), 25.0);
  ps.get("w").value = Tensor::from_rows({{6, 8}});
  EXPECT_EQ(l2_penalty_value(ps), 100.0);
  Tape t;
  Var w = t.param(ps.get("w"));
  EXPECT_EQ(l2_penalty(t, {w}).value().item(), 100.0);
}

TEST(Substream, DeterministicAndIndependent) {
  auto a = substream(5, 1, 2), b = substream(5, 1, 2), c = substream(5, 1, 3), d = substream(5, 2, 2);
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
  EXPECT_NE(x, d());
}

TEST(ParamStore, NamesAreUnique) {
  ParamStore ps;
  ps.create("w", Tensor(1, 1));
  EXPECT_THROW(ps.create("w", Tensor(1, 1)), ContractError);
  EXPECT_THROW(ps.get("missing"), ContractError);
}

}  // namespace
}  // namespace hetgl
