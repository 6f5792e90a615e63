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
#include <span>
#include <string>
#include <vector>

namespace hetgl {

enum class NodeKind { kUser, kItem };

struct NodeId {
  NodeKind kind = NodeKind::kUser;
  std::size_t index = 0;

  static NodeId user(std::size_t i) { return {NodeKind::kUser, i}; }
  static NodeId item(std::size_t j) { return {NodeKind::kItem, j}; }
  bool operator==(const NodeId&) const = default;
};

std::string to_string(NodeId id);

enum class EdgeKind { kSocial, kRating, kSimilarity };

// Social: user-user. Rating(level): user-item, level in 1..K.
// Similarity: item-item.
struct EdgeType {
  EdgeKind kind = EdgeKind::kSocial;
  std::size_t level = 0;

  static EdgeType social() { return {EdgeKind::kSocial, 0}; }
  static EdgeType rating(std::size_t k) { return {EdgeKind::kRating, k}; }
  static EdgeType similarity() { return {EdgeKind::kSimilarity, 0}; }
};

// Sorted distinct rating values. Level k (1-based) is the k-th value.
class RatingScale {
 public:
  RatingScale() = default;
  // Throws ContractError unless there are at least two distinct values.
  explicit RatingScale(std::vector<double> values);

  std::size_t levels() const { return values_.size(); }
  // 1-based level of an observed rating; throws ContractError if unknown.
  std::size_t level_of(double rating) const;
  double value_of(std::size_t level) const;
  double min() const { return values_.front(); }
  double max() const { return values_.back(); }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

// User-user social edges, K rating-typed user-item partitions and
// item-item similarity edges. Adjacency lists are kept sorted by index and
// their lengths are the cached degrees. Built single-writer, then read
// concurrently.
class HeteroGraph {
 public:
  HeteroGraph() = default;
  HeteroGraph(std::size_t users, std::size_t items, std::size_t levels);

  std::size_t num_users() const { return social_.size(); }
  std::size_t num_items() const { return similar_.size(); }
  std::size_t num_levels() const { return user_items_.size(); }

  // Returns false when the edge was already present. Throws KindError when
  // the endpoints do not fit the edge type, BoundsError for bad indices or
  // levels, ContractError for a self-loop or a user-item pair already
  // stored under a different level.
  bool add_edge(NodeId a, NodeId b, EdgeType type);

  std::vector<NodeId> neighbors(NodeId node, EdgeType type) const;

  // Raw sorted index lists. Rating accessors take a 1-based level.
  std::span<const std::size_t> social(std::size_t user) const {
    return social_[user];
  }
  std::span<const std::size_t> similar(std::size_t item) const {
    return similar_[item];
  }
  std::span<const std::size_t> items_rated(std::size_t user,
                                           std::size_t level) const {
    return user_items_[level - 1][user];
  }
  std::span<const std::size_t> raters(std::size_t item,
                                      std::size_t level) const {
    return item_users_[level - 1][item];
  }

  std::size_t social_degree(std::size_t user) const {
    return social_[user].size();
  }
  std::size_t similar_degree(std::size_t item) const {
    return similar_[item].size();
  }
  std::size_t rated_degree(std::size_t user, std::size_t level) const {
    return user_items_[level - 1][user].size();
  }
  std::size_t rater_degree(std::size_t item, std::size_t level) const {
    return item_users_[level - 1][item].size();
  }

  // 0 when the pair is not connected.
  std::size_t rating_level(std::size_t user, std::size_t item) const;

  std::size_t num_social_edges() const;      // undirected count
  std::size_t num_similarity_edges() const;  // undirected count
  std::size_t num_rating_edges() const;

 private:
  void check_index(NodeId id) const;

  std::vector<std::vector<std::size_t>> social_;
  std::vector<std::vector<std::size_t>> similar_;
  // [level-1][user] -> items, [level-1][item] -> users
  std::vector<std::vector<std::vector<std::size_t>>> user_items_;
  std::vector<std::vector<std::vector<std::size_t>>> item_users_;
};

}  // namespace hetgl
