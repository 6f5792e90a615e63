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

#include <random>
#include <vector>

#include "hetgl/engine/ops.hpp"
#include "hetgl/hgnn/subgraph.hpp"

namespace hetgl::hgnn {

// One layer's weights bound on a tape. W: D×D applied as x·Wᵀ, b: 1×D.
// Rating weights are per level and shared by both directions.
struct LayerVars {
  Var w_social, b_social;
  std::vector<Var> w_rating, b_rating;
  Var w_similar, b_similar;
};

// p_i' = ReLU( (p_social + Σ_k p_k) / (K+1) ) for the users of hop h, with
//   p_social = b_u + Σ_{n ∈ U(i)} W_u p_n / c_in
//   p_k      = b_k + Σ_{m ∈ V^k(i)} W_k q_m / c_im
// An empty neighborhood leaves only its bias.
Var user_layer(const LayerEdges& edges, Var users_in, Var items_in,
               const LayerVars& vars);

// Mirror of user_layer with item-item similarity edges (W_v, b_v) and the
// per-level raters.
Var item_layer(const LayerEdges& edges, Var users_in, Var items_in,
               const LayerVars& vars);

struct ForwardResult {
  // [0..T]: embeddings of the target users / items after each layer.
  std::vector<Var> user_layers;
  std::vector<Var> item_layers;
};

// T = vars.size() layers over the subgraph. `user_table`/`item_table` are
// the full layer-0 embedding tables. Dropout (inverted, probability p) is
// applied to every layer output when training.
ForwardResult hgnn_forward(const BatchSubgraph& sg, Var user_table,
                           Var item_table, const std::vector<LayerVars>& vars,
                           double dropout, std::mt19937_64& rng, bool training);

}  // namespace hetgl::hgnn
