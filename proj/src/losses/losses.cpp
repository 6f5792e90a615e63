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

#include "hetgl/losses/losses.hpp"

#include <cmath>

#include "hetgl/errors.hpp"

namespace hetgl::losses {

void LossWeights::validate() const {
  if (beta < 0 || beta1 < 0 || beta2 < 0 || gamma_u < 0 || gamma_v < 0 || eta < 0) {
    throw ContractError("loss weights must be nonnegative");
  }
}

Var symmetrize(Var refined, double eps) {
  Var inv_colsum = ops::div(
      refined.tape().constant(Tensor(1, refined.cols(), 1.0)),
      ops::floor_at(ops::sum_rows(refined), eps));
  return ops::matmul_nt(ops::mul_row_vector(refined, inv_colsum), refined);
}

Var smoothness_loss(Var adj, Var features) {
  const std::size_t b = adj.rows();
  if (adj.cols() != b || features.rows() != b) {
    throw ShapeError("smoothness: adjacency " + adj.value().shape_string() +
                     " vs features " + features.value().shape_string());
  }
  Var degree = ops::sum_cols(adj);
  Var diag_term = ops::sum(ops::mul_col_vector(ops::square(features), degree));
  Var cross_term = ops::sum(ops::mul(adj, ops::matmul_nt(features, features)));
  const double bb = static_cast<double>(b) * static_cast<double>(b);
  return ops::scale(ops::sub(diag_term, cross_term), 1.0 / bb);
}

double smoothness_pairwise(const Tensor& adj, const Tensor& features) {
  const std::size_t b = adj.rows();
  double s = 0.0;
  for (std::size_t i = 0; i < b; ++i)
    for (std::size_t n = 0; n < b; ++n) {
      double d2 = 0.0;
      for (std::size_t c = 0; c < features.cols(); ++c) {
        const double d = features(i, c) - features(n, c);
        d2 += d * d;
      }
      s += adj(i, n) * d2;
    }
  return s / (2.0 * static_cast<double>(b) * static_cast<double>(b));
}

Var connectivity_sparsity(Var adj, double beta1, double beta2) {
  const double b = static_cast<double>(adj.rows());
  Var connect = ops::scale(ops::sum(ops::log(ops::floor_at(ops::sum_cols(adj), kFloor))),
                           -beta1 / b);
  Var sparse = ops::scale(ops::frobenius_norm(adj), beta2 / (b * b));
  return ops::add(connect, sparse);
}

Var graph_learner_loss(Var refined, Var features, const LossWeights& w) {
  w.validate();
  Var adj = symmetrize(refined);
  return ops::add(ops::scale(smoothness_loss(adj, features), w.beta),
                  connectivity_sparsity(adj, w.beta1, w.beta2));
}

Var rating_loss(Var predictions, const Tensor& targets) {
  if (predictions.rows() == 0) throw ContractError("rating loss: empty batch");
  if (predictions.cols() != 1 || targets.rows() != predictions.rows() ||
      targets.cols() != 1) {
    throw ShapeError("rating loss: predictions " + predictions.value().shape_string() +
                     " vs targets " + targets.shape_string());
  }
  Var residual = ops::sub(predictions, predictions.tape().constant(targets));
  return ops::mean(ops::square(residual));
}

Var hybrid_loss(Var rating, std::optional<Var> user_graph,
                std::optional<Var> item_graph, std::optional<Var> l2,
                const LossWeights& w) {
  w.validate();
  Var total = rating;
  if (user_graph) total = ops::add(total, ops::scale(*user_graph, w.gamma_u));
  if (item_graph) total = ops::add(total, ops::scale(*item_graph, w.gamma_v));
  if (l2) total = ops::add(total, ops::scale(*l2, w.eta));
  return total;
}

}  // namespace hetgl::losses
