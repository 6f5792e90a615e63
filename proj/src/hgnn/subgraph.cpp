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

#include "hetgl/hgnn/subgraph.hpp"

#include <algorithm>
#include <cmath>

#include "hetgl/errors.hpp"

namespace hetgl::hgnn {

RefinedRows unweighted(const learner::RefinedAdjacency& refined) {
  RefinedRows rows;
  rows.targets = refined.targets;
  rows.neighbors.reserve(refined.neighbors.size());
  for (const auto& list : refined.neighbors) {
    std::vector<std::size_t> ids;
    ids.reserve(list.size());
    for (const auto& n : list) ids.push_back(n.id);
    std::sort(ids.begin(), ids.end());
    rows.neighbors.push_back(std::move(ids));
  }
  return rows;
}

EffectiveGraph::EffectiveGraph(const HeteroGraph& graph, const RefinedRows* users,
                               const RefinedRows* items)
    : graph_(graph),
      users_(users),
      items_(items),
      user_slot_(graph.num_users(), -1),
      item_slot_(graph.num_items(), -1) {
  auto index = [](const RefinedRows* rows, std::vector<std::ptrdiff_t>& slot) {
    if (rows == nullptr) return;
    if (rows->targets.size() != rows->neighbors.size()) {
      throw ContractError("refined rows: one neighbor list per target required");
    }
    for (std::size_t i = 0; i < rows->targets.size(); ++i) {
      if (rows->targets[i] >= slot.size()) throw BoundsError("refined target out of range");
      slot[rows->targets[i]] = static_cast<std::ptrdiff_t>(i);
      for (std::size_t n : rows->neighbors[i])
        if (n >= slot.size()) throw BoundsError("refined neighbor out of range");
    }
  };
  index(users, user_slot_);
  index(items, item_slot_);
}

std::span<const std::size_t> EffectiveGraph::social(std::size_t user) const {
  const auto s = user_slot_[user];
  if (s >= 0) return users_->neighbors[static_cast<std::size_t>(s)];
  return graph_.social(user);
}

std::span<const std::size_t> EffectiveGraph::similar(std::size_t item) const {
  const auto s = item_slot_[item];
  if (s >= 0) return items_->neighbors[static_cast<std::size_t>(s)];
  return graph_.similar(item);
}

namespace {

// Dense position of each node within one hop.
struct HopIndex {
  std::vector<std::ptrdiff_t> pos;
  std::vector<std::size_t> order;

  explicit HopIndex(std::size_t n) : pos(n, -1) {}
  bool add(std::size_t id) {
    if (pos[id] >= 0) return false;
    pos[id] = static_cast<std::ptrdiff_t>(order.size());
    order.push_back(id);
    return true;
  }
  std::size_t at(std::size_t id) const { return static_cast<std::size_t>(pos[id]); }
};

double inv_sqrt_degrees(std::size_t a, std::size_t b) {
  return 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(a, 1)) *
                         static_cast<double>(std::max<std::size_t>(b, 1)));
}

}  // namespace

BatchSubgraph build_batch_subgraph(const HeteroGraph& graph,
                                   const RefinedRows* users,
                                   const RefinedRows* items,
                                   std::span<const std::size_t> target_users,
                                   std::span<const std::size_t> target_items,
                                   std::size_t layers) {
  const EffectiveGraph eff(graph, users, items);
  const std::size_t levels = graph.num_levels();
  BatchSubgraph sg;
  sg.layers = layers;
  sg.levels = levels;

  HopIndex uh(graph.num_users()), ih(graph.num_items());
  for (std::size_t u : target_users) {
    if (u >= graph.num_users()) throw BoundsError("target user out of range");
    uh.add(u);
  }
  for (std::size_t v : target_items) {
    if (v >= graph.num_items()) throw BoundsError("target item out of range");
    ih.add(v);
  }
  sg.user_hops.push_back(uh.order);
  sg.item_hops.push_back(ih.order);

  for (std::size_t h = 0; h < layers; ++h) {
    const std::vector<std::size_t> cur_users = sg.user_hops[h];
    const std::vector<std::size_t> cur_items = sg.item_hops[h];
    // Hop h+1 extends hop h; HopIndex keeps earlier nodes at their slots.
    for (std::size_t u : cur_users) {
      for (std::size_t n : eff.social(u)) uh.add(n);
      for (std::size_t k = 1; k <= levels; ++k)
        for (std::size_t v : graph.items_rated(u, k)) ih.add(v);
    }
    for (std::size_t v : cur_items) {
      for (std::size_t m : eff.similar(v)) ih.add(m);
      for (std::size_t k = 1; k <= levels; ++k)
        for (std::size_t u : graph.raters(v, k)) uh.add(u);
    }
    sg.user_hops.push_back(uh.order);
    sg.item_hops.push_back(ih.order);

    LayerEdges e;
    auto social = std::make_shared<SparseRows>();
    social->cols = uh.order.size();
    for (std::size_t u : cur_users) {
      const auto nb = eff.social(u);
      for (std::size_t n : nb)
        social->push(uh.at(n), inv_sqrt_degrees(nb.size(), eff.social(n).size()));
      social->end_row();
    }
    e.social = std::move(social);

    auto similar = std::make_shared<SparseRows>();
    similar->cols = ih.order.size();
    for (std::size_t v : cur_items) {
      const auto nb = eff.similar(v);
      for (std::size_t m : nb)
        similar->push(ih.at(m), inv_sqrt_degrees(nb.size(), eff.similar(m).size()));
      similar->end_row();
    }
    e.similar = std::move(similar);

    for (std::size_t k = 1; k <= levels; ++k) {
      auto ur = std::make_shared<SparseRows>();
      ur->cols = ih.order.size();
      for (std::size_t u : cur_users) {
        const auto nb = graph.items_rated(u, k);
        for (std::size_t v : nb)
          ur->push(ih.at(v), inv_sqrt_degrees(nb.size(), graph.rater_degree(v, k)));
        ur->end_row();
      }
      e.user_rating.push_back(std::move(ur));

      auto ir = std::make_shared<SparseRows>();
      ir->cols = uh.order.size();
      for (std::size_t v : cur_items) {
        const auto nb = graph.raters(v, k);
        for (std::size_t u : nb)
          ir->push(uh.at(u), inv_sqrt_degrees(nb.size(), graph.rated_degree(u, k)));
        ir->end_row();
      }
      e.item_rating.push_back(std::move(ir));
    }
    sg.edges.push_back(std::move(e));
  }
  return sg;
}

}  // namespace hetgl::hgnn
