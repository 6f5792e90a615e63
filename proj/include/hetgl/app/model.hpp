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

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "hetgl/app/config.hpp"
#include "hetgl/data/dataset.hpp"
#include "hetgl/engine/optim.hpp"
#include "hetgl/hgnn/hgnn.hpp"
#include "hetgl/learner/graph_learner.hpp"
#include "hetgl/predictor/predictor.hpp"

namespace hetgl::app {

// Every parameter of the recommender bound on one tape.
struct BoundParams {
  Var user_table;  // N×D
  Var item_table;  // M×D
  std::vector<hgnn::LayerVars> layers;
  predictor::ReadoutVars readout;
  predictor::MlpVars mlp;
  std::vector<Var> gl_user;
  std::vector<Var> gl_item;
  std::vector<Var> all;
};

struct AnchorPair {
  learner::AnchorSet users;
  learner::AnchorSet items;
};

struct BatchOutput {
  Var raw;   // B×1 unclamped predictions
  Var loss;  // hybrid objective (training) or rating MSE (eval)
  Var rating_loss;
  std::optional<Var> user_graph_loss;
  std::optional<Var> item_graph_loss;
  std::optional<learner::RefinedAdjacency> refined_users;
  std::optional<learner::RefinedAdjacency> refined_items;
  std::uint64_t sim_ops = 0;
};

class RecModel {
 public:
  RecModel(const TrainConfig& cfg, std::size_t n_users, std::size_t n_items,
           std::size_t levels);

  const TrainConfig& config() const { return cfg_; }
  std::size_t n_users() const { return n_users_; }
  std::size_t n_items() const { return n_items_; }
  std::size_t levels() const { return levels_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  BoundParams bind(Tape& tape);

  // One batch end to end. `anchors` selects the anchored learner; null
  // means the full learner. Graph-learning and L2 terms are only added to
  // the loss when training.
  BatchOutput forward(Tape& tape, const HeteroGraph& graph,
                      std::span<const data::Rating> batch,
                      const AnchorPair* anchors, bool training,
                      std::mt19937_64& rng);

 private:
  TrainConfig cfg_;
  std::size_t n_users_;
  std::size_t n_items_;
  std::size_t levels_;
  ParamStore params_;
};

// Distinct values in first-seen order.
std::vector<std::size_t> distinct_in_order(std::span<const std::size_t> ids);

}  // namespace hetgl::app
