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

#include "hetgl/graph/hetero_graph.hpp"

#include <algorithm>

#include "hetgl/errors.hpp"

namespace hetgl {
namespace {

// Inserts keeping the list sorted; false if already present.
bool sorted_insert(std::vector<std::size_t>& list, std::size_t v) {
  auto it = std::lower_bound(list.begin(), list.end(), v);
  if (it != list.end() && *it == v) return false;
  list.insert(it, v);
  return true;
}

bool sorted_contains(const std::vector<std::size_t>& list, std::size_t v) {
  return std::binary_search(list.begin(), list.end(), v);
}

}  // namespace

std::string to_string(NodeId id) {
  return (id.kind == NodeKind::kUser ? "u" : "v") + std::to_string(id.index);
}

RatingScale::RatingScale(std::vector<double> values) : values_(std::move(values)) {
  std::sort(values_.begin(), values_.end());
  values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
  if (values_.size() < 2) {
    throw ContractError("rating scale needs at least two distinct levels");
  }
}

std::size_t RatingScale::level_of(double rating) const {
  auto it = std::lower_bound(values_.begin(), values_.end(), rating);
  if (it == values_.end() || *it != rating) {
    throw ContractError("rating " + std::to_string(rating) +
                        " is not a level of the scale");
  }
  return static_cast<std::size_t>(it - values_.begin()) + 1;
}

double RatingScale::value_of(std::size_t level) const {
  if (level == 0 || level > values_.size()) {
    throw BoundsError("rating level " + std::to_string(level) + " outside 1.." +
                      std::to_string(values_.size()));
  }
  return values_[level - 1];
}

HeteroGraph::HeteroGraph(std::size_t users, std::size_t items,
                         std::size_t levels)
    : social_(users),
      similar_(items),
      user_items_(levels, std::vector<std::vector<std::size_t>>(users)),
      item_users_(levels, std::vector<std::vector<std::size_t>>(items)) {}

void HeteroGraph::check_index(NodeId id) const {
  const std::size_t bound =
      id.kind == NodeKind::kUser ? num_users() : num_items();
  if (id.index >= bound) {
    throw BoundsError("node " + to_string(id) + " out of range (bound " +
                      std::to_string(bound) + ")");
  }
}

bool HeteroGraph::add_edge(NodeId a, NodeId b, EdgeType type) {
  switch (type.kind) {
    case EdgeKind::kSocial:
      if (a.kind != NodeKind::kUser || b.kind != NodeKind::kUser)
        throw KindError("social edges connect two users");
      break;
    case EdgeKind::kSimilarity:
      if (a.kind != NodeKind::kItem || b.kind != NodeKind::kItem)
        throw KindError("similarity edges connect two items");
      break;
    case EdgeKind::kRating:
      if (a.kind == b.kind) throw KindError("rating edges connect a user and an item");
      if (a.kind == NodeKind::kItem) std::swap(a, b);
      if (type.level == 0 || type.level > num_levels())
        throw BoundsError("rating level " + std::to_string(type.level) +
                          " outside 1.." + std::to_string(num_levels()));
      break;
  }
  check_index(a);
  check_index(b);

  if (type.kind == EdgeKind::kRating) {
    const std::size_t existing = rating_level(a.index, b.index);
    if (existing == type.level) return false;
    if (existing != 0) {
      throw ContractError("pair (" + to_string(a) + "," + to_string(b) +
                          ") already stored at level " + std::to_string(existing));
    }
    sorted_insert(user_items_[type.level - 1][a.index], b.index);
    sorted_insert(item_users_[type.level - 1][b.index], a.index);
    return true;
  }

  if (a.index == b.index) throw ContractError("self-loop on " + to_string(a));
  auto& adj = type.kind == EdgeKind::kSocial ? social_ : similar_;
  const bool inserted = sorted_insert(adj[a.index], b.index);
  sorted_insert(adj[b.index], a.index);
  return inserted;
}

std::vector<NodeId> HeteroGraph::neighbors(NodeId node, EdgeType type) const {
  check_index(node);
  std::vector<NodeId> out;
  auto emit = [&out](std::span<const std::size_t> list, NodeKind kind) {
    for (std::size_t i : list) out.push_back({kind, i});
  };
  switch (type.kind) {
    case EdgeKind::kSocial:
      if (node.kind != NodeKind::kUser) throw KindError("social neighbors of an item");
      emit(social_[node.index], NodeKind::kUser);
      break;
    case EdgeKind::kSimilarity:
      if (node.kind != NodeKind::kItem) throw KindError("similarity neighbors of a user");
      emit(similar_[node.index], NodeKind::kItem);
      break;
    case EdgeKind::kRating:
      if (type.level == 0 || type.level > num_levels())
        throw BoundsError("rating level " + std::to_string(type.level) + " out of range");
      if (node.kind == NodeKind::kUser)
        emit(user_items_[type.level - 1][node.index], NodeKind::kItem);
      else
        emit(item_users_[type.level - 1][node.index], NodeKind::kUser);
      break;
  }
  return out;
}

std::size_t HeteroGraph::rating_level(std::size_t user, std::size_t item) const {
  for (std::size_t k = 0; k < user_items_.size(); ++k)
    if (sorted_contains(user_items_[k][user], item)) return k + 1;
  return 0;
}

std::size_t HeteroGraph::num_social_edges() const {
  std::size_t n = 0;
  for (const auto& l : social_) n += l.size();
  return n / 2;
}

std::size_t HeteroGraph::num_similarity_edges() const {
  std::size_t n = 0;
  for (const auto& l : similar_) n += l.size();
  return n / 2;
}

std::size_t HeteroGraph::num_rating_edges() const {
  std::size_t n = 0;
  for (const auto& part : user_items_)
    for (const auto& l : part) n += l.size();
  return n;
}

}  // namespace hetgl
