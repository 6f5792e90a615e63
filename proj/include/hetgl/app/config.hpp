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
#include <string>

#include "json.hpp"

#include "hetgl/learner/graph_learner.hpp"
#include "hetgl/losses/losses.hpp"

namespace hetgl::app {

// Every knob of a run. Field names double as CLI flag names.
struct TrainConfig {
  std::size_t dim = 64;
  std::size_t batch = 128;
  double lr = 0.001;
  double dropout = 0.4;
  std::size_t layers = 2;
  std::size_t trunc = 20;
  std::size_t perspectives = 1;
  double lambda_w = 0.5;
  learner::SimilarityMetric metric = learner::SimilarityMetric::kWeightedCosine;
  std::size_t k_items = 20;
  double anchor_rate = 0.0;  // 0 selects the full learner
  double beta = 1.0;
  double beta1 = 0.1;
  double beta2 = 0.1;
  double gamma_u = 0.1;
  double gamma_v = 0.1;
  double eta = 1e-5;
  std::size_t epochs = 100;
  std::uint64_t seed = 1;
  std::size_t patience = 10;
  bool graph_learner = true;
  double init_std = 0.01;

  // Throws ContractError naming the offending field.
  void validate() const;

  losses::LossWeights loss_weights() const {
    return {beta, beta1, beta2, gamma_u, gamma_v, eta};
  }
  learner::GraphLearnerConfig learner_config() const {
    return {{metric, perspectives}, lambda_w, trunc};
  }
};

nlohmann::json to_json(const TrainConfig& cfg);
// Missing keys keep their defaults; unknown keys are rejected.
TrainConfig config_from_json(const nlohmann::json& j);

}  // namespace hetgl::app
