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

#include "hetgl/learner/item_edges.hpp"

#include <algorithm>
#include <cmath>

#include "hetgl/errors.hpp"

namespace hetgl::learner {

std::vector<std::pair<std::size_t, std::size_t>> select_similar_items(
    const std::vector<data::Rating>& train, std::size_t n_users,
    std::size_t n_items, std::size_t k) {
  if (k == 0) throw ContractError("item-item selection count must be >= 1");
  std::vector<std::vector<std::pair<std::size_t, double>>> by_user(n_users);
  std::vector<std::vector<std::pair<std::size_t, double>>> by_item(n_items);
  for (const auto& r : train) {
    if (r.user >= n_users || r.item >= n_items)
      throw BoundsError("rating references an unknown user or item");
    by_user[r.user].emplace_back(r.item, r.value);
    by_item[r.item].emplace_back(r.user, r.value);
  }
  std::vector<double> norm(n_items, 0.0);
  for (std::size_t j = 0; j < n_items; ++j) {
    double s = 0;
    for (const auto& [u, v] : by_item[j]) s += v * v;
    norm[j] = std::sqrt(s);
  }

  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::vector<double> acc(n_items, 0.0);
  std::vector<char> marked(n_items, 0);
  std::vector<std::size_t> touched;
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t j = 0; j < n_items; ++j) {
    if (norm[j] == 0.0) continue;
    touched.clear();
    for (const auto& [u, rj] : by_item[j]) {
      for (const auto& [m, rm] : by_user[u]) {
        if (m == j) continue;
        if (!marked[m]) {
          marked[m] = 1;
          touched.push_back(m);
        }
        acc[m] += rj * rm;
      }
    }
    scored.clear();
    for (std::size_t m : touched) {
      const double cos = acc[m] / (norm[j] * norm[m]);
      if (cos > 0.0) scored.emplace_back(cos, m);
      acc[m] = 0.0;
      marked[m] = 0;
    }
    const std::size_t keep = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep),
                      scored.end(), [](const auto& a, const auto& b) {
                        return a.first != b.first ? a.first > b.first
                                                  : a.second < b.second;
                      });
    for (std::size_t i = 0; i < keep; ++i) out.emplace_back(j, scored[i].second);
  }
  return out;
}

HeteroGraph build_global_graph(const data::DatasetBundle& bundle,
                               std::size_t similar_items_k) {
  HeteroGraph g(bundle.users.size(), bundle.items.size(), bundle.scale.levels());
  for (const auto& r : bundle.train) {
    g.add_edge(NodeId::user(r.user), NodeId::item(r.item),
               EdgeType::rating(bundle.scale.level_of(r.value)));
  }
  for (const auto& [a, b] : bundle.links)
    g.add_edge(NodeId::user(a), NodeId::user(b), EdgeType::social());
  for (const auto& [j, m] : select_similar_items(
           bundle.train, bundle.users.size(), bundle.items.size(), similar_items_k)) {
    g.add_edge(NodeId::item(j), NodeId::item(m), EdgeType::similarity());
  }
  return g;
}

}  // namespace hetgl::learner
