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
#include <utility>
#include <vector>

#include "hetgl/data/dataset.hpp"
#include "hetgl/graph/hetero_graph.hpp"

namespace hetgl::learner {

// For every item j, the (at most) k items m != j with the largest positive
// cosine between rating-matrix columns e_j and e_m, ties to the smaller
// index. Returned as directed selections (j, m) in order of j.
std::vector<std::pair<std::size_t, std::size_t>> select_similar_items(
    const std::vector<data::Rating>& train, std::size_t n_users,
    std::size_t n_items, std::size_t k);

// Training ratings as K rating-typed partitions, the social links, and
// symmetric item-item edges from select_similar_items.
HeteroGraph build_global_graph(const data::DatasetBundle& bundle,
                               std::size_t similar_items_k);

}  // namespace hetgl::learner
