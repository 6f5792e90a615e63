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

#include "hetgl/app/config.hpp"

#include "hetgl/errors.hpp"

namespace hetgl::app {
namespace {

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  throw ContractError("config." + field + ": " + why);
}

}  // namespace

void TrainConfig::validate() const {
  if (dim < 2) bad("dim", "must be >= 2");
  if (batch == 0) bad("batch", "must be >= 1");
  if (!(lr > 0)) bad("lr", "must be positive");
  if (dropout < 0 || dropout >= 1) bad("dropout", "must lie in [0,1)");
  if (layers < 1 || layers > 4) bad("layers", "must lie in 1..4");
  if (trunc < 1) bad("trunc", "must be >= 1");
  if (perspectives < 1) bad("perspectives", "must be >= 1");
  if (lambda_w < 0 || lambda_w > 1) bad("lambda_w", "must lie in [0,1]");
  if (k_items < 1) bad("k_items", "must be >= 1");
  if (anchor_rate < 0 || anchor_rate > 1) bad("anchor_rate", "must lie in [0,1]");
  if (epochs < 1) bad("epochs", "must be >= 1");
  if (!(init_std > 0)) bad("init_std", "must be positive");
  loss_weights().validate();
}

nlohmann::json to_json(const TrainConfig& c) {
  return nlohmann::json{
      {"dim", c.dim},
      {"batch", c.batch},
      {"lr", c.lr},
      {"dropout", c.dropout},
      {"layers", c.layers},
      {"trunc", c.trunc},
      {"perspectives", c.perspectives},
      {"lambda_w", c.lambda_w},
      {"metric", std::string(learner::metric_name(c.metric))},
      {"k_items", c.k_items},
      {"anchor_rate", c.anchor_rate},
      {"beta", c.beta},
      {"beta1", c.beta1},
      {"beta2", c.beta2},
      {"gamma_u", c.gamma_u},
      {"gamma_v", c.gamma_v},
      {"eta", c.eta},
      {"epochs", c.epochs},
      {"seed", c.seed},
      {"patience", c.patience},
      {"graph_learner", c.graph_learner},
      {"init_std", c.init_std},
  };
}

TrainConfig config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  const nlohmann::json defaults = to_json(c);
  for (const auto& [key, value] : j.items())
    if (!defaults.contains(key)) bad(key, "unknown field");
  auto get = [&j](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("dim", c.dim);
  get("batch", c.batch);
  get("lr", c.lr);
  get("dropout", c.dropout);
  get("layers", c.layers);
  get("trunc", c.trunc);
  get("perspectives", c.perspectives);
  get("lambda_w", c.lambda_w);
  if (j.contains("metric")) c.metric = learner::parse_metric(j.at("metric").get<std::string>());
  get("k_items", c.k_items);
  get("anchor_rate", c.anchor_rate);
  get("beta", c.beta);
  get("beta1", c.beta1);
  get("beta2", c.beta2);
  get("gamma_u", c.gamma_u);
  get("gamma_v", c.gamma_v);
  get("eta", c.eta);
  get("epochs", c.epochs);
  get("seed", c.seed);
  get("patience", c.patience);
  get("graph_learner", c.graph_learner);
  get("init_std", c.init_std);
  return c;
}

}  // namespace hetgl::app
