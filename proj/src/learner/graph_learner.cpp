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

#include "hetgl/learner/graph_learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hetgl/engine/optim.hpp"
#include "hetgl/errors.hpp"

namespace hetgl::learner {
namespace {

constexpr std::uint64_t kAnchorStream = 0x616e63686f72ULL;  // "anchor"

// Rows of x rescaled to unit length; zero rows stay zero.
Var unit_rows(Var x) {
  return ops::mul_col_vector(x, ops::safe_reciprocal(ops::row_norms(x)));
}

std::span<const std::size_t> adjacency(NodeKind kind, const HeteroGraph& g,
                                       std::size_t node) {
  return kind == NodeKind::kUser ? g.social(node) : g.similar(node);
}

}  // namespace

std::string_view metric_name(SimilarityMetric m) {
  switch (m) {
    case SimilarityMetric::kWeightedCosine:
      return "weighted_cosine";
    case SimilarityMetric::kAttention:
      return "attention";
    case SimilarityMetric::kAddAttention:
      return "add_attention";
  }
  return "unknown";
}

SimilarityMetric parse_metric(std::string_view name) {
  if (name == "weighted_cosine") return SimilarityMetric::kWeightedCosine;
  if (name == "attention") return SimilarityMetric::kAttention;
  if (name == "add_attention") return SimilarityMetric::kAddAttention;
  throw ContractError("unknown similarity metric '" + std::string(name) + "'");
}

std::pair<std::size_t, std::size_t> metric_weight_shape(SimilarityMetric m,
                                                        std::size_t dim) {
  if (m == SimilarityMetric::kAddAttention) return {1, dim};
  return {dim, dim};
}

Var pairwise_similarity(Var targets, Var candidates, const SimilarityConfig& cfg,
                        std::span<const Var> weights, std::uint64_t* op_count) {
  if (cfg.perspectives == 0) throw ContractError("similarity needs F >= 1 perspectives");
  if (weights.size() != cfg.perspectives) {
    throw ContractError("similarity: expected " + std::to_string(cfg.perspectives) +
                        " weight sets, got " + std::to_string(weights.size()));
  }
  const std::size_t dim = targets.cols();
  if (candidates.cols() != dim) {
    throw ShapeError("similarity: target/candidate widths differ " +
                     targets.value().shape_string() + " vs " +
                     candidates.value().shape_string());
  }
  const auto expected = metric_weight_shape(cfg.metric, dim);
  Var total;
  for (std::size_t f = 0; f < cfg.perspectives; ++f) {
    const Var w = weights[f];
    if (w.rows() != expected.first || w.cols() != expected.second) {
      throw ShapeError("similarity: weight " + w.value().shape_string() +
                       " does not fit embedding width " + std::to_string(dim));
    }
    Var sim;
    switch (cfg.metric) {
      case SimilarityMetric::kWeightedCosine:
        sim = ops::matmul_nt(unit_rows(ops::matmul_nt(targets, w)),
                             unit_rows(ops::matmul_nt(candidates, w)));
        break;
      case SimilarityMetric::kAttention:
        sim = ops::matmul_nt(ops::matmul_nt(targets, w),
                             ops::matmul_nt(candidates, w));
        break;
      case SimilarityMetric::kAddAttention:
        sim = ops::relu(ops::outer_sum(ops::matmul_nt(targets, w),
                                       ops::matmul_nt(candidates, w)));
        break;
    }
    if (op_count != nullptr) *op_count += static_cast<std::uint64_t>(sim.rows()) * sim.cols();
    total = f == 0 ? sim : ops::add(total, sim);
  }
  if (cfg.perspectives == 1) return total;
  return ops::scale(total, 1.0 / static_cast<double>(cfg.perspectives));
}

Var fuse_with_initial(Var sim, const Tensor& initial, double lambda_w) {
  if (lambda_w < 0.0 || lambda_w > 1.0) {
    throw ContractError("fusion weight must lie in [0,1]");
  }
  if (!sim.value().same_shape(initial)) {
    throw ShapeError("fuse_with_initial: " + sim.value().shape_string() + " vs " +
                     initial.shape_string());
  }
  Tensor base = initial;
  for (double& v : base.data()) v *= (1.0 - lambda_w);
  Var learned = ops::scale(ops::clamp(sim, 0.0, 1.0), lambda_w);
  return ops::add(learned, sim.tape().constant(std::move(base)));
}

std::vector<std::vector<Neighbor>> truncate_top_l(
    const Tensor& fused, std::size_t trunc_l,
    std::span<const std::size_t> target_ids,
    std::span<const std::size_t> candidate_ids) {
  if (trunc_l == 0) throw ContractError("truncation length must be >= 1");
  if (fused.rows() != target_ids.size() || fused.cols() != candidate_ids.size()) {
    throw ShapeError("truncate_top_l: matrix " + fused.shape_string() +
                     " vs " + std::to_string(target_ids.size()) + " targets, " +
                     std::to_string(candidate_ids.size()) + " candidates");
  }
  std::vector<std::vector<Neighbor>> out(target_ids.size());
  std::vector<Neighbor> row;
  auto stronger = [](const Neighbor& a, const Neighbor& b) {
    return a.weight != b.weight ? a.weight > b.weight : a.id < b.id;
  };
  for (std::size_t i = 0; i < target_ids.size(); ++i) {
    row.clear();
    for (std::size_t c = 0; c < candidate_ids.size(); ++c) {
      const double w = fused(i, c);
      if (w > 0.0 && candidate_ids[c] != target_ids[i]) row.push_back({candidate_ids[c], w});
    }
    const std::size_t keep = std::min(trunc_l, row.size());
    std::partial_sort(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(keep),
                      row.end(), stronger);
    out[i].assign(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(keep));
  }
  return out;
}

AnchorSet sample_anchors(NodeKind kind, std::size_t count, double tau,
                         std::uint64_t epoch, std::uint64_t seed) {
  if (!(tau > 0.0 && tau <= 1.0)) throw ContractError("anchor rate must lie in (0,1]");
  if (count == 0) throw ContractError("cannot sample anchors from an empty node set");
  const auto h = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(tau * static_cast<double>(count))), 1, count);
  auto rng = substream(seed, kAnchorStream + (kind == NodeKind::kUser ? 0 : 1), epoch);
  std::vector<std::size_t> pool(count);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < h; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, count - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(h);
  std::sort(pool.begin(), pool.end());
  return AnchorSet{kind, epoch, std::move(pool)};
}

Tensor initial_rows(NodeKind kind, const HeteroGraph& graph,
                    std::span<const std::size_t> targets,
                    std::span<const std::size_t> candidates) {
  Tensor a(targets.size(), candidates.size());
  const bool sorted = std::is_sorted(candidates.begin(), candidates.end());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto adj = adjacency(kind, graph, targets[i]);
    if (sorted) {
      for (std::size_t n : adj) {
        auto it = std::lower_bound(candidates.begin(), candidates.end(), n);
        if (it != candidates.end() && *it == n)
          a(i, static_cast<std::size_t>(it - candidates.begin())) = 1.0;
      }
    } else {
      for (std::size_t c = 0; c < candidates.size(); ++c)
        if (std::binary_search(adj.begin(), adj.end(), candidates[c])) a(i, c) = 1.0;
    }
  }
  return a;
}

namespace {

RefinedAdjacency learn_against(std::span<const std::size_t> targets,
                               NodeKind kind, const HeteroGraph& graph,
                               std::vector<std::size_t> candidates,
                               Var embeddings, std::span<const Var> weights,
                               const GraphLearnerConfig& cfg) {
  if (targets.empty()) throw ContractError("graph learner: empty target batch");
  if (candidates.empty()) throw ContractError("graph learner: empty candidate set");
  const std::size_t count =
      kind == NodeKind::kUser ? graph.num_users() : graph.num_items();
  if (embeddings.rows() != count) {
    throw ShapeError("graph learner: embedding table " +
                     embeddings.value().shape_string() + " vs " +
                     std::to_string(count) + " nodes");
  }
  RefinedAdjacency out;
  out.kind = kind;
  out.targets.assign(targets.begin(), targets.end());
  out.candidates = std::move(candidates);
  Var target_rows = ops::gather_rows(embeddings, out.targets);
  Var candidate_rows = ops::gather_rows(embeddings, out.candidates);
  Var sim = pairwise_similarity(target_rows, candidate_rows, cfg.similarity,
                                weights, &out.sim_ops);
  out.fused = fuse_with_initial(
      sim, initial_rows(kind, graph, out.targets, out.candidates), cfg.lambda_w);
  out.neighbors = truncate_top_l(out.fused.value(), cfg.trunc_l, out.targets,
                                 out.candidates);
  return out;
}

}  // namespace

RefinedAdjacency learn_subgraph(std::span<const std::size_t> targets,
                                NodeKind kind, const HeteroGraph& graph,
                                Var embeddings, std::span<const Var> weights,
                                const GraphLearnerConfig& cfg) {
  const std::size_t count =
      kind == NodeKind::kUser ? graph.num_users() : graph.num_items();
  std::vector<std::size_t> all(count);
  std::iota(all.begin(), all.end(), std::size_t{0});
  return learn_against(targets, kind, graph, std::move(all), embeddings, weights,
                       cfg);
}

RefinedAdjacency learn_subgraph_anchored(std::span<const std::size_t> targets,
                                         const HeteroGraph& graph,
                                         const AnchorSet& anchors,
                                         Var embeddings,
                                         std::span<const Var> weights,
                                         const GraphLearnerConfig& cfg) {
  return learn_against(targets, anchors.kind, graph, anchors.ids, embeddings,
                       weights, cfg);
}

}  // namespace hetgl::learner
