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

// Differentiable primitives. Shapes are explicit: no op broadcasts except
// `scale` (scalar times tensor) and the *_row_vector / *_col_vector ops,
// which name the vector's orientation. A shape mismatch throws ShapeError
// quoting both shapes.

#include <cstddef>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "hetgl/engine/tape.hpp"

namespace hetgl {

// Row-compressed sparse matrix with constant weights. Row r covers entries
// offsets[r] .. offsets[r+1]-1.
struct SparseRows {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> offsets{0};
  std::vector<std::size_t> indices;
  std::vector<double> weights;

  std::size_t nnz() const { return indices.size(); }
  void push(std::size_t col, double weight) {
    indices.push_back(col);
    weights.push_back(weight);
  }
  void end_row() {
    offsets.push_back(indices.size());
    ++rows;
  }
};

namespace ops {

Var matmul(Var a, Var b);     // (m×k)(k×n)
Var matmul_nt(Var a, Var b);  // (m×k)(n×k)ᵀ
Var transpose(Var a);

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);  // elementwise
Var div(Var a, Var b);  // elementwise
Var scale(Var a, double s);
Var add_scalar(Var a, double s);

Var relu(Var a);
// min(max(x, lo), hi); zero gradient outside [lo, hi].
Var clamp(Var a, double lo, double hi);
// max(x, lo); zero gradient where the floor is active.
Var floor_at(Var a, double lo);
Var sqrt(Var a);
Var log(Var a);
Var square(Var a);
// 1/x, with 0 (and zero gradient) where x == 0.
Var safe_reciprocal(Var a);

Var concat_cols(Var a, Var b);
Var gather_rows(Var a, std::span<const std::size_t> rows);
Var slice_rows(Var a, std::size_t begin, std::size_t end);

Var sum(Var a);       // 1×1
Var mean(Var a);      // 1×1
Var sum_rows(Var a);  // (m×n) -> 1×n, sums down each column
Var sum_cols(Var a);  // (m×n) -> m×1, sums along each row

// Per-row Euclidean norm, m×1. Zero rows get zero gradient.
Var row_norms(Var a);
// Frobenius norm, 1×1. Zero gradient at the zero matrix.
Var frobenius_norm(Var a);

// a(m×n) + v(1×n) on every row.
Var add_row_vector(Var a, Var v);
// a(m×n) ∘ v(1×n) on every row: scales column j by v_j.
Var mul_row_vector(Var a, Var v);
// a(m×n) ∘ v(m×1) on every column: scales row i by v_i.
Var mul_col_vector(Var a, Var v);
// out(i,j) = a_i + b_j for a(m×1), b(n×1).
Var outer_sum(Var a, Var b);

// out = S · x with constant sparse S(r×m), x(m×n).
Var spmm(std::shared_ptr<const SparseRows> s, Var x);

// Elementwise multiply by a constant mask; the mask is recorded.
Var mul_constant(Var a, Tensor mask);

// Inverted dropout. Identity when !training or p == 0.
Var dropout(Var a, double p, std::mt19937_64& rng, bool training);

}  // namespace ops
}  // namespace hetgl
