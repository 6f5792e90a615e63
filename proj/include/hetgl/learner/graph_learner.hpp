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

// Per-batch structure learning over the user-user and item-item subgraphs.
//
// Targets are scored against a candidate set (every node, or a sampled
// anchor set) with an F-perspective learned similarity, the scores are
// fused with the initial adjacency rows, and each target keeps its L
// strongest candidates as refined neighbors.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hetgl/engine/ops.hpp"
#include "hetgl/graph/hetero_graph.hpp"

namespace hetgl::learner {

enum class SimilarityMetric { kWeightedCosine, kAttention, kAddAttention };

std::string_view metric_name(SimilarityMetric m);
// Throws ContractError for unknown names.
SimilarityMetric parse_metric(std::string_view name);

struct SimilarityConfig {
  SimilarityMetric metric = SimilarityMetric::kWeightedCosine;
  std::size_t perspectives = 1;
};

// Weight shape for one perspective: D×D for the two matrix metrics, 1×D
// for add-attention.
std::pair<std::size_t, std::size_t> metric_weight_shape(SimilarityMetric m,
                                                        std::size_t dim);

// (1/F)·Σ_f sim_f(target_i, candidate_n), B×C.
//   weighted cosine: cos(W_f x_i, W_f y_n), 0 when either side is zero
//   attention:       (W_f x_i)ᵀ(W_f y_n)
//   add-attention:   ReLU(w_fᵀx_i + w_fᵀy_n)
// `op_count`, when given, is incremented by B·C per perspective.
Var pairwise_similarity(Var targets, Var candidates, const SimilarityConfig& cfg,
                        std::span<const Var> weights,
                        std::uint64_t* op_count = nullptr);

// λ·clamp(sim, 0, 1) + (1−λ)·initial. `initial` is a constant B×C 0/1 matrix.
Var fuse_with_initial(Var sim, const Tensor& initial, double lambda_w);

struct Neighbor {
  std::size_t id = 0;
  double weight = 0.0;
  bool operator==(const Neighbor&) const = default;
};

// Per row: the L largest strictly positive entries, skipping the column
// whose candidate id equals the row's target id. Sorted by descending
// weight, ties to the smaller candidate id.
std::vector<std::vector<Neighbor>> truncate_top_l(
    const Tensor& fused, std::size_t trunc_l,
    std::span<const std::size_t> target_ids,
    std::span<const std::size_t> candidate_ids);

struct AnchorSet {
  NodeKind kind = NodeKind::kUser;
  std::uint64_t epoch = 0;
  std::vector<std::size_t> ids;  // ascending
};

// H = max(1, round(τ·count)) distinct ids drawn uniformly from a
// substream keyed by (seed, kind, epoch). Throws ContractError unless
// 0 < τ <= 1 and count >= 1.
AnchorSet sample_anchors(NodeKind kind, std::size_t count, double tau,
                         std::uint64_t epoch, std::uint64_t seed);

struct GraphLearnerConfig {
  SimilarityConfig similarity;
  double lambda_w = 0.5;
  std::size_t trunc_l = 20;
};

struct RefinedAdjacency {
  NodeKind kind = NodeKind::kUser;
  std::vector<std::size_t> targets;
  std::vector<std::size_t> candidates;
  Var fused;  // B×C on the batch tape
  std::vector<std::vector<Neighbor>> neighbors;  // one list per target
  std::uint64_t sim_ops = 0;
};

// Full learner: candidates are every node of `kind`. `embeddings` is the
// whole layer-0 table (N×D or M×D) bound on the tape. Initial rows come
// from the social (users) or similarity (items) adjacency.
RefinedAdjacency learn_subgraph(std::span<const std::size_t> targets,
                                NodeKind kind, const HeteroGraph& graph,
                                Var embeddings, std::span<const Var> weights,
                                const GraphLearnerConfig& cfg);

// Anchored learner: candidates are the anchor ids, initial rows the
// corresponding adjacency columns.
RefinedAdjacency learn_subgraph_anchored(std::span<const std::size_t> targets,
                                         const HeteroGraph& graph,
                                         const AnchorSet& anchors,
                                         Var embeddings,
                                         std::span<const Var> weights,
                                         const GraphLearnerConfig& cfg);

// Initial adjacency rows A(targets, candidates) as a 0/1 matrix.
Tensor initial_rows(NodeKind kind, const HeteroGraph& graph,
                    std::span<const std::size_t> targets,
                    std::span<const std::size_t> candidates);

}  // namespace hetgl::learner
