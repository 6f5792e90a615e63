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

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "hetgl/engine/ops.hpp"
#include "hetgl/graph/hetero_graph.hpp"
#include "hetgl/learner/graph_learner.hpp"

namespace hetgl::hgnn {

// Refined neighbor lists for a set of target nodes, ascending ids.
struct RefinedRows {
  std::vector<std::size_t> targets;
  std::vector<std::vector<std::size_t>> neighbors;
};

// Drops the learned weights; refined edges are unweighted in the HGNN.
RefinedRows unweighted(const learner::RefinedAdjacency& refined);

// The graph a batch actually aggregates over: refined social/similarity
// rows for targets, initial adjacency everywhere else. Rating edges are
// never refined.
class EffectiveGraph {
 public:
  EffectiveGraph(const HeteroGraph& graph, const RefinedRows* users,
                 const RefinedRows* items);

  const HeteroGraph& base() const { return graph_; }
  std::span<const std::size_t> social(std::size_t user) const;
  std::span<const std::size_t> similar(std::size_t item) const;

 private:
  const HeteroGraph& graph_;
  const RefinedRows* users_;
  const RefinedRows* items_;
  std::vector<std::ptrdiff_t> user_slot_;
  std::vector<std::ptrdiff_t> item_slot_;
};

// Normalized edges from the nodes of hop h (rows) to the nodes of hop h+1
// (columns). Weights are 1/c with c the geometric mean of the two
// endpoint degrees under the relevant edge type.
struct LayerEdges {
  std::shared_ptr<const SparseRows> social;                    // users × users
  std::vector<std::shared_ptr<const SparseRows>> user_rating;  // per level: users × items
  std::shared_ptr<const SparseRows> similar;                   // items × items
  std::vector<std::shared_ptr<const SparseRows>> item_rating;  // per level: items × users
};

// hops[0] are the batch targets, hops[h+1] is the closure of hops[h] under
// every edge type. Each hop lists its predecessor's nodes first, in the
// same order, so the targets are always the leading rows.
struct BatchSubgraph {
  std::size_t layers = 0;
  std::size_t levels = 0;
  std::vector<std::vector<std::size_t>> user_hops;
  std::vector<std::vector<std::size_t>> item_hops;
  std::vector<LayerEdges> edges;  // edges[h]: hop h -> hop h+1, h < layers

  std::size_t target_users() const { return user_hops.front().size(); }
  std::size_t target_items() const { return item_hops.front().size(); }
};

// Builds the T-hop frontier around the targets. `users`/`items` may be
// null (no refinement). Degrees in the normalization come from the
// effective graph; a zero degree on the far side of a refined edge counts
// as one.
BatchSubgraph build_batch_subgraph(const HeteroGraph& graph,
                                   const RefinedRows* users,
                                   const RefinedRows* items,
                                   std::span<const std::size_t> target_users,
                                   std::span<const std::size_t> target_items,
                                   std::size_t layers);

}  // namespace hetgl::hgnn
