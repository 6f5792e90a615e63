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

#include "hetgl/hgnn/hgnn.hpp"

#include "hetgl/errors.hpp"

namespace hetgl::hgnn {
namespace {

// b + S·X·Wᵀ
Var aggregate(const std::shared_ptr<const SparseRows>& s, Var x, Var w, Var b) {
  return ops::add_row_vector(ops::matmul_nt(ops::spmm(s, x), w), b);
}

void check_levels(const LayerEdges& edges, const LayerVars& vars) {
  if (vars.w_rating.size() != edges.user_rating.size() ||
      vars.b_rating.size() != edges.user_rating.size()) {
    throw ContractError("HGNN layer: " + std::to_string(vars.w_rating.size()) +
                        " rating weight sets for " +
                        std::to_string(edges.user_rating.size()) + " levels");
  }
}

}  // namespace

Var user_layer(const LayerEdges& edges, Var users_in, Var items_in,
               const LayerVars& vars) {
  check_levels(edges, vars);
  Var acc = aggregate(edges.social, users_in, vars.w_social, vars.b_social);
  for (std::size_t k = 0; k < edges.user_rating.size(); ++k)
    acc = ops::add(acc, aggregate(edges.user_rating[k], items_in,
                                  vars.w_rating[k], vars.b_rating[k]));
  const double inv = 1.0 / static_cast<double>(edges.user_rating.size() + 1);
  return ops::relu(ops::scale(acc, inv));
}

Var item_layer(const LayerEdges& edges, Var users_in, Var items_in,
               const LayerVars& vars) {
  check_levels(edges, vars);
  Var acc = aggregate(edges.similar, items_in, vars.w_similar, vars.b_similar);
  for (std::size_t k = 0; k < edges.item_rating.size(); ++k)
    acc = ops::add(acc, aggregate(edges.item_rating[k], users_in,
                                  vars.w_rating[k], vars.b_rating[k]));
  const double inv = 1.0 / static_cast<double>(edges.item_rating.size() + 1);
  return ops::relu(ops::scale(acc, inv));
}

ForwardResult hgnn_forward(const BatchSubgraph& sg, Var user_table,
                           Var item_table, const std::vector<LayerVars>& vars,
                           double dropout, std::mt19937_64& rng, bool training) {
  const std::size_t layers = vars.size();
  if (layers != sg.layers) {
    throw ContractError("HGNN: subgraph built for " + std::to_string(sg.layers) +
                        " layers, got " + std::to_string(layers) + " weight sets");
  }
  const std::size_t bu = sg.target_users();
  const std::size_t bi = sg.target_items();

  // Layer-0 embeddings of the outermost hop.
  Var users = ops::gather_rows(user_table, sg.user_hops[layers]);
  Var items = ops::gather_rows(item_table, sg.item_hops[layers]);

  ForwardResult out;
  out.user_layers.push_back(ops::slice_rows(users, 0, bu));
  out.item_layers.push_back(ops::slice_rows(items, 0, bi));
  for (std::size_t l = 1; l <= layers; ++l) {
    const LayerEdges& e = sg.edges[layers - l];
    Var next_users = user_layer(e, users, items, vars[l - 1]);
    Var next_items = item_layer(e, users, items, vars[l - 1]);
    users = ops::dropout(next_users, dropout, rng, training);
    items = ops::dropout(next_items, dropout, rng, training);
    out.user_layers.push_back(ops::slice_rows(users, 0, bu));
    out.item_layers.push_back(ops::slice_rows(items, 0, bi));
  }
  return out;
}

}  // namespace hetgl::hgnn
