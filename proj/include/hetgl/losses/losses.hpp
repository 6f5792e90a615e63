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

#include <optional>

#include "hetgl/engine/ops.hpp"

namespace hetgl::losses {

inline constexpr double kFloor = 1e-12;

struct LossWeights {
  double beta = 1.0;    // smoothness scale
  double beta1 = 0.1;   // connectivity
  double beta2 = 0.1;   // sparsity
  double gamma_u = 0.1;
  double gamma_v = 0.1;
  double eta = 1e-5;    // L2

  // Throws ContractError if any weight is negative.
  void validate() const;
};

// Â = Ã Δ⁻¹ Ãᵀ (B×B), Δ = diag of the column sums of Ã floored at eps.
Var symmetrize(Var refined, double eps = kFloor);

// (1/B²)·tr(Xᵀ(D − Â)X), equal to (1/(2B²))·Σ_in Â_in ‖x_i − x_n‖² for
// symmetric Â.
Var smoothness_loss(Var adj, Var features);

// The pairwise double sum, evaluated directly (no tape).
double smoothness_pairwise(const Tensor& adj, const Tensor& features);

// −(β1/B)·1ᵀlog(max(Â1, eps)) + (β2/B²)·‖Â‖_F
Var connectivity_sparsity(Var adj, double beta1, double beta2);

// β·smoothness(Â, X) + connectivity_sparsity(Â) with Â = symmetrize(Ã).
Var graph_learner_loss(Var refined, Var features, const LossWeights& w);

// (1/B)·Σ(r̂ − r)². `predictions` is B×1. Throws ContractError when empty.
Var rating_loss(Var predictions, const Tensor& targets);

// L_r + γ_u·L_G^u + γ_v·L_G^v + η·Ω. Absent terms contribute nothing.
Var hybrid_loss(Var rating, std::optional<Var> user_graph,
                std::optional<Var> item_graph, std::optional<Var> l2,
                const LossWeights& w);

}  // namespace hetgl::losses
