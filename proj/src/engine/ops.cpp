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

#include "hetgl/engine/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hetgl/errors.hpp"
#include "hetgl/simd/kernels.hpp"

namespace hetgl::ops {
namespace {

[[noreturn]] void shape_fail(const char* op, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op) + ": shape mismatch " + a.shape_string() +
                   " vs " + b.shape_string());
}

void same_tape(const char* op, Var a, Var b) {
  if (&a.tape() != &b.tape()) {
    throw ContractError(std::string(op) + ": operands on different tapes");
  }
}

void require_same(const char* op, Var a, Var b) {
  same_tape(op, a, b);
  if (!a.value().same_shape(b.value())) shape_fail(op, a.value(), b.value());
}

// Elementwise op; df(x, y) is dy/dx given input x and output y.
template <typename F, typename DF>
Var unary(Var a, F f, DF df) {
  const Tensor& x = a.value();
  Tensor out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = f(x[i]);
  const std::size_t ia = a.id();
  return a.tape().record(
      std::move(out), {a},
      [ia, df](Tape& t, const Tensor& y, const Tensor& g) {
        const Tensor& xv = t.value(ia);
        Tensor* ga = t.grad_sink(ia);
        for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i] * df(xv[i], y[i]);
      });
}

}  // namespace

Var matmul(Var a, Var b) {
  same_tape("matmul", a, b);
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  if (x.cols() != y.rows()) shape_fail("matmul", x, y);
  const std::size_t m = x.rows(), k = x.cols(), n = y.cols();
  Tensor out(m, n);
  simd::active_kernels().gemm_nn(x.data().data(), y.data().data(),
                                 out.data().data(), m, k, n);
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(
      std::move(out), {a, b},
      [ia, ib, m, k, n](Tape& t, const Tensor&, const Tensor& g) {
        const auto& kern = simd::active_kernels();
        if (Tensor* ga = t.grad_sink(ia)) {
          // dA = G · Bᵀ
          kern.gemm_nt(g.data().data(), t.value(ib).data().data(),
                       ga->data().data(), m, n, k);
        }
        if (Tensor* gb = t.grad_sink(ib)) {
          // dB = Aᵀ · G
          kern.gemm_tn(t.value(ia).data().data(), g.data().data(),
                       gb->data().data(), k, m, n);
        }
      });
}

Var matmul_nt(Var a, Var b) {
  same_tape("matmul_nt", a, b);
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  if (x.cols() != y.cols()) shape_fail("matmul_nt", x, y);
  const std::size_t m = x.rows(), k = x.cols(), n = y.rows();
  Tensor out(m, n);
  simd::active_kernels().gemm_nt(x.data().data(), y.data().data(),
                                 out.data().data(), m, k, n);
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(
      std::move(out), {a, b},
      [ia, ib, m, k, n](Tape& t, const Tensor&, const Tensor& g) {
        const auto& kern = simd::active_kernels();
        if (Tensor* ga = t.grad_sink(ia)) {
          // dA = G · B
          kern.gemm_nn(g.data().data(), t.value(ib).data().data(),
                       ga->data().data(), m, n, k);
        }
        if (Tensor* gb = t.grad_sink(ib)) {
          // dB = Gᵀ · A
          kern.gemm_tn(g.data().data(), t.value(ia).data().data(),
                       gb->data().data(), n, m, k);
        }
      });
}

Var transpose(Var a) {
  const Tensor& x = a.value();
  Tensor out(x.cols(), x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) out(j, i) = x(i, j);
  const std::size_t ia = a.id();
  return a.tape().record(std::move(out), {a},
                         [ia](Tape& t, const Tensor&, const Tensor& g) {
                           Tensor* ga = t.grad_sink(ia);
                           for (std::size_t i = 0; i < g.rows(); ++i)
                             for (std::size_t j = 0; j < g.cols(); ++j)
                               (*ga)(j, i) += g(i, j);
                         });
}

Var add(Var a, Var b) {
  require_same("add", a, b);
  Tensor out = a.value();
  out.add_inplace(b.value());
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out), {a, b},
                         [ia, ib](Tape& t, const Tensor&, const Tensor& g) {
                           if (Tensor* ga = t.grad_sink(ia)) ga->add_inplace(g);
                           if (Tensor* gb = t.grad_sink(ib)) gb->add_inplace(g);
                         });
}

Var sub(Var a, Var b) {
  require_same("sub", a, b);
  Tensor out = a.value();
  const Tensor& y = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= y[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out), {a, b},
                         [ia, ib](Tape& t, const Tensor&, const Tensor& g) {
                           if (Tensor* ga = t.grad_sink(ia)) ga->add_inplace(g);
                           if (Tensor* gb = t.grad_sink(ib))
                             for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i] -= g[i];
                         });
}

Var mul(Var a, Var b) {
  require_same("mul", a, b);
  Tensor out = a.value();
  const Tensor& y = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= y[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(
      std::move(out), {a, b}, [ia, ib](Tape& t, const Tensor&, const Tensor& g) {
        if (Tensor* ga = t.grad_sink(ia)) {
          const Tensor& yv = t.value(ib);
          for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i] * yv[i];
        }
        if (Tensor* gb = t.grad_sink(ib)) {
          const Tensor& xv = t.value(ia);
          for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i] += g[i] * xv[i];
        }
      });
}

Var div(Var a, Var b) {
  require_same("div", a, b);
  Tensor out = a.value();
  const Tensor& y = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] /= y[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(
      std::move(out), {a, b}, [ia, ib](Tape& t, const Tensor& q, const Tensor& g) {
        const Tensor& yv = t.value(ib);
        if (Tensor* ga = t.grad_sink(ia))
          for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i] / yv[i];
        if (Tensor* gb = t.grad_sink(ib))
          for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i] -= g[i] * q[i] / yv[i];
      });
}

Var scale(Var a, double s) {
  return unary(a, [s](double x) { return s * x; },
               [s](double, double) { return s; });
}

Var add_scalar(Var a, double s) {
  return unary(a, [s](double x) { return x + s; },
               [](double, double) { return 1.0; });
}

Var relu(Var a) {
  return unary(a, [](double x) { return x > 0.0 ? x : 0.0; },
               [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var clamp(Var a, double lo, double hi) {
  return unary(a, [lo, hi](double x) { return std::clamp(x, lo, hi); },
               [lo, hi](double x, double) {
                 return (x > lo && x < hi) ? 1.0 : 0.0;
               });
}

Var floor_at(Var a, double lo) {
  return unary(a, [lo](double x) { return x > lo ? x : lo; },
               [lo](double x, double) { return x > lo ? 1.0 : 0.0; });
}

Var sqrt(Var a) {
  return unary(a, [](double x) { return std::sqrt(x); },
               [](double, double y) { return 0.5 / y; });
}

Var log(Var a) {
  return unary(a, [](double x) { return std::log(x); },
               [](double x, double) { return 1.0 / x; });
}

Var square(Var a) {
  return unary(a, [](double x) { return x * x; },
               [](double x, double) { return 2.0 * x; });
}

Var safe_reciprocal(Var a) {
  return unary(a, [](double x) { return x == 0.0 ? 0.0 : 1.0 / x; },
               [](double x, double y) { return x == 0.0 ? 0.0 : -y * y; });
}

Var concat_cols(Var a, Var b) {
  same_tape("concat_cols", a, b);
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  if (x.rows() != y.rows()) shape_fail("concat_cols", x, y);
  const std::size_t m = x.rows(), na = x.cols(), nb = y.cols();
  Tensor out(m, na + nb);
  for (std::size_t i = 0; i < m; ++i) {
    std::copy(x.row(i).begin(), x.row(i).end(), out.row(i).begin());
    std::copy(y.row(i).begin(), y.row(i).end(), out.row(i).begin() + na);
  }
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(
      std::move(out), {a, b}, [ia, ib, m, na, nb](Tape& t, const Tensor&, const Tensor& g) {
        Tensor* ga = t.grad_sink(ia);
        Tensor* gb = t.grad_sink(ib);
        for (std::size_t i = 0; i < m; ++i) {
          auto gr = g.row(i);
          if (ga) for (std::size_t j = 0; j < na; ++j) (*ga)(i, j) += gr[j];
          if (gb) for (std::size_t j = 0; j < nb; ++j) (*gb)(i, j) += gr[na + j];
        }
      });
}

Var gather_rows(Var a, std::span<const std::size_t> rows) {
  const Tensor& x = a.value();
  const std::size_t n = x.cols();
  Tensor out(rows.size(), n);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= x.rows()) {
      throw BoundsError("gather_rows: row " + std::to_string(rows[i]) +
                        " out of range for " + x.shape_string());
    }
    std::copy(x.row(rows[i]).begin(), x.row(rows[i]).end(), out.row(i).begin());
  }
  const std::size_t ia = a.id();
  return a.tape().record(
      std::move(out), {a},
      [ia, idx = std::vector<std::size_t>(rows.begin(), rows.end())](
          Tape& t, const Tensor&, const Tensor& g) {
        Tensor* ga = t.grad_sink(ia);
        const auto& kern = simd::active_kernels();
        for (std::size_t i = 0; i < idx.size(); ++i)
          kern.axpy(1.0, g.row(i).data(), ga->row(idx[i]).data(), g.cols());
      });
}

Var slice_rows(Var a, std::size_t begin, std::size_t end) {
  const Tensor& x = a.value();
  if (begin > end || end > x.rows()) {
    throw BoundsError("slice_rows: [" + std::to_string(begin) + "," +
                      std::to_string(end) + ") out of range for " +
                      x.shape_string());
  }
  const std::size_t n = x.cols();
  Tensor out(end - begin, n,
             std::vector<double>(x.data().begin() + begin * n,
                                 x.data().begin() + end * n));
  const std::size_t ia = a.id();
  return a.tape().record(std::move(out), {a},
                         [ia, begin, n](Tape& t, const Tensor&, const Tensor& g) {
                           Tensor* ga = t.grad_sink(ia);
                           for (std::size_t i = 0; i < g.size(); ++i)
                             (*ga)[begin * n + i] += g[i];
                         });
}

Var sum(Var a) {
  double s = 0.0;
  for (double v : a.value().data()) s += v;
  const std::size_t ia = a.id();
  return a.tape().record(Tensor::scalar(s), {a},
                         [ia](Tape& t, const Tensor&, const Tensor& g) {
                           Tensor* ga = t.grad_sink(ia);
                           const double gv = g[0];
                           for (double& v : ga->data()) v += gv;
                         });
}

Var mean(Var a) {
  const std::size_t n = a.value().size();
  if (n == 0) throw ContractError("mean: empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(n));
}

Var sum_rows(Var a) {
  const Tensor& x = a.value();
  Tensor out(1, x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) out[j] += x(i, j);
  const std::size_t ia = a.id();
  return a.tape().record(std::move(out), {a},
                         [ia](Tape& t, const Tensor&, const Tensor& g) {
                           Tensor* ga = t.grad_sink(ia);
                           for (std::size_t i = 0; i < ga->rows(); ++i)
                             for (std::size_t j = 0; j < ga->cols(); ++j)
                               (*ga)(i, j) += g[j];
                         });
}

Var sum_cols(Var a) {
  const Tensor& x = a.value();
  Tensor out(x.rows(), 1);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double s = 0.0;
    for (double v : x.row(i)) s += v;
    out[i] = s;
  }
  const std::size_t ia = a.id();
  return a.tape().record(std::move(out), {a},
                         [ia](Tape& t, const Tensor&, const Tensor& g) {
                           Tensor* ga = t.grad_sink(ia);
                           for (std::size_t i = 0; i < ga->rows(); ++i)
                             for (double& v : ga->row(i)) v += g[i];
                         });
}

Var row_norms(Var a) {
  const Tensor& x = a.value();
  const auto& kern = simd::active_kernels();
  Tensor out(x.rows(), 1);
  for (std::size_t i = 0; i < x.rows(); ++i)
    out[i] = std::sqrt(kern.dot(x.row(i).data(), x.row(i).data(), x.cols()));
  const std::size_t ia = a.id();
  return a.tape().record(
      std::move(out), {a}, [ia](Tape& t, const Tensor& y, const Tensor& g) {
        Tensor* ga = t.grad_sink(ia);
        const Tensor& xv = t.value(ia);
        const auto& k = simd::active_kernels();
        for (std::size_t i = 0; i < xv.rows(); ++i) {
          if (y[i] == 0.0) continue;
          k.axpy(g[i] / y[i], xv.row(i).data(), ga->row(i).data(), xv.cols());
        }
      });
}

Var frobenius_norm(Var a) {
  const Tensor& x = a.value();
  const double n =
      std::sqrt(simd::active_kernels().dot(x.data().data(), x.data().data(), x.size()));
  const std::size_t ia = a.id();
  return a.tape().record(
      Tensor::scalar(n), {a}, [ia](Tape& t, const Tensor& y, const Tensor& g) {
        if (y[0] == 0.0) return;
        Tensor* ga = t.grad_sink(ia);
        const Tensor& xv = t.value(ia);
        simd::active_kernels().axpy(g[0] / y[0], xv.data().data(),
                                    ga->data().data(), xv.size());
      });
}

Var add_row_vector(Var a, Var v) {
  same_tape("add_row_vector", a, v);
  const Tensor& x = a.value();
  const Tensor& r = v.value();
  if (r.rows() != 1 || r.cols() != x.cols()) shape_fail("add_row_vector", x, r);
  Tensor out = x;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += r[j];
  const std::size_t ia = a.id(), iv = v.id();
  return a.tape().record(std::move(out), {a, v},
                         [ia, iv](Tape& t, const Tensor&, const Tensor& g) {
                           if (Tensor* ga = t.grad_sink(ia)) ga->add_inplace(g);
                           if (Tensor* gv = t.grad_sink(iv))
                             for (std::size_t i = 0; i < g.rows(); ++i)
                               for (std::size_t j = 0; j < g.cols(); ++j)
                                 (*gv)[j] += g(i, j);
                         });
}

Var mul_row_vector(Var a, Var v) {
  same_tape("mul_row_vector", a, v);
  const Tensor& x = a.value();
  const Tensor& r = v.value();
  if (r.rows() != 1 || r.cols() != x.cols()) shape_fail("mul_row_vector", x, r);
  Tensor out = x;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) *= r[j];
  const std::size_t ia = a.id(), iv = v.id();
  return a.tape().record(
      std::move(out), {a, v}, [ia, iv](Tape& t, const Tensor&, const Tensor& g) {
        const Tensor& xv = t.value(ia);
        const Tensor& rv = t.value(iv);
        Tensor* ga = t.grad_sink(ia);
        Tensor* gv = t.grad_sink(iv);
        for (std::size_t i = 0; i < g.rows(); ++i)
          for (std::size_t j = 0; j < g.cols(); ++j) {
            if (ga) (*ga)(i, j) += g(i, j) * rv[j];
            if (gv) (*gv)[j] += g(i, j) * xv(i, j);
          }
      });
}

Var mul_col_vector(Var a, Var v) {
  same_tape("mul_col_vector", a, v);
  const Tensor& x = a.value();
  const Tensor& c = v.value();
  if (c.cols() != 1 || c.rows() != x.rows()) shape_fail("mul_col_vector", x, c);
  Tensor out = x;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (double& e : out.row(i)) e *= c[i];
  const std::size_t ia = a.id(), iv = v.id();
  return a.tape().record(
      std::move(out), {a, v}, [ia, iv](Tape& t, const Tensor&, const Tensor& g) {
        const Tensor& xv = t.value(ia);
        const Tensor& cv = t.value(iv);
        const auto& k = simd::active_kernels();
        if (Tensor* ga = t.grad_sink(ia))
          for (std::size_t i = 0; i < g.rows(); ++i)
            k.axpy(cv[i], g.row(i).data(), ga->row(i).data(), g.cols());
        if (Tensor* gv = t.grad_sink(iv))
          for (std::size_t i = 0; i < g.rows(); ++i)
            (*gv)[i] += k.dot(g.row(i).data(), xv.row(i).data(), g.cols());
      });
}

Var outer_sum(Var a, Var b) {
  same_tape("outer_sum", a, b);
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  if (x.cols() != 1 || y.cols() != 1) shape_fail("outer_sum", x, y);
  Tensor out(x.rows(), y.rows());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < y.rows(); ++j) out(i, j) = x[i] + y[j];
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(
      std::move(out), {a, b}, [ia, ib](Tape& t, const Tensor&, const Tensor& g) {
        Tensor* ga = t.grad_sink(ia);
        Tensor* gb = t.grad_sink(ib);
        for (std::size_t i = 0; i < g.rows(); ++i)
          for (std::size_t j = 0; j < g.cols(); ++j) {
            if (ga) (*ga)[i] += g(i, j);
            if (gb) (*gb)[j] += g(i, j);
          }
      });
}

Var spmm(std::shared_ptr<const SparseRows> s, Var x) {
  const Tensor& xv = x.value();
  if (s->cols != xv.rows()) {
    throw ShapeError("spmm: shape mismatch " + shape_string(s->rows, s->cols) +
                     " vs " + xv.shape_string());
  }
  const std::size_t n = xv.cols();
  Tensor out(s->rows, n);
  const auto& kern = simd::active_kernels();
  for (std::size_t r = 0; r < s->rows; ++r) {
    double* orow = out.row(r).data();
    for (std::size_t e = s->offsets[r]; e < s->offsets[r + 1]; ++e) {
      if (s->indices[e] >= xv.rows()) throw BoundsError("spmm: column index out of range");
      kern.axpy(s->weights[e], xv.row(s->indices[e]).data(), orow, n);
    }
  }
  const std::size_t ix = x.id();
  return x.tape().record(
      std::move(out), {x}, [ix, s, n](Tape& t, const Tensor&, const Tensor& g) {
        Tensor* gx = t.grad_sink(ix);
        const auto& k = simd::active_kernels();
        for (std::size_t r = 0; r < s->rows; ++r) {
          const double* grow = g.row(r).data();
          for (std::size_t e = s->offsets[r]; e < s->offsets[r + 1]; ++e)
            k.axpy(s->weights[e], grow, gx->row(s->indices[e]).data(), n);
        }
      });
}

Var mul_constant(Var a, Tensor mask) {
  const Tensor& x = a.value();
  if (!x.same_shape(mask)) shape_fail("mul_constant", x, mask);
  Tensor out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  const std::size_t ia = a.id();
  return a.tape().record(
      std::move(out), {a},
      [ia, m = std::move(mask)](Tape& t, const Tensor&, const Tensor& g) {
        Tensor* ga = t.grad_sink(ia);
        for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i] * m[i];
      });
}

Var dropout(Var a, double p, std::mt19937_64& rng, bool training) {
  if (p < 0.0 || p >= 1.0) {
    throw ContractError("dropout: probability must lie in [0,1), got " +
                        std::to_string(p));
  }
  if (!training || p == 0.0) return a;
  const double keep_scale = 1.0 / (1.0 - p);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Tensor mask(a.rows(), a.cols());
  for (double& m : mask.data()) m = unif(rng) < p ? 0.0 : keep_scale;
  return mul_constant(a, std::move(mask));
}

}  // namespace hetgl::ops
