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

#include "hetgl/app/model.hpp"

#include <string>
#include <unordered_map>

#include "hetgl/errors.hpp"
#include "hetgl/hgnn/subgraph.hpp"
#include "hetgl/losses/losses.hpp"

namespace hetgl::app {
namespace {

constexpr std::uint64_t kInitStream = 0x696e6974;

std::string layer_name(std::size_t l, const std::string& what) {
  return "layer" + std::to_string(l) + "." + what;
}

}  // namespace

std::vector<std::size_t> distinct_in_order(std::span<const std::size_t> ids) {
  std::vector<std::size_t> out;
  std::unordered_map<std::size_t, bool> seen;
  for (std::size_t id : ids)
    if (seen.emplace(id, true).second) out.push_back(id);
  return out;
}

RecModel::RecModel(const TrainConfig& cfg, std::size_t n_users,
                   std::size_t n_items, std::size_t levels)
    : cfg_(cfg), n_users_(n_users), n_items_(n_items), levels_(levels) {
  cfg_.validate();
  if (n_users == 0 || n_items == 0) throw ContractError("model: empty user or item set");
  if (levels < 2) throw ContractError("model: need at least two rating levels");
  std::mt19937_64 rng = substream(cfg.seed, kInitStream, 0);
  const std::size_t d = cfg.dim;
  const double sd = cfg.init_std;
  auto make = [&](const std::string& name, std::size_t r, std::size_t c) {
    params_.create(name, gaussian_init(r, c, rng, sd));
  };
  make("P", n_users, d);
  make("Q", n_items, d);
  for (std::size_t l = 1; l <= cfg.layers; ++l) {
    make(layer_name(l, "w_social"), d, d);
    make(layer_name(l, "b_social"), 1, d);
    for (std::size_t k = 1; k <= levels; ++k) {
      make(layer_name(l, "w_rating" + std::to_string(k)), d, d);
      make(layer_name(l, "b_rating" + std::to_string(k)), 1, d);
    }
    make(layer_name(l, "w_similar"), d, d);
    make(layer_name(l, "b_similar"), 1, d);
  }
  make("readout.w", d, d);
  make("readout.s", d, 1);
  make("readout.b", 1, d);
  const std::size_t widths[] = {2 * d, d, d / 2, 1};
  for (std::size_t l = 0; l + 1 < std::size(widths); ++l) {
    make("mlp.w" + std::to_string(l), widths[l + 1], widths[l]);
    make("mlp.b" + std::to_string(l), 1, widths[l + 1]);
  }
  // Created last so that toggling the learner leaves every other draw intact.
  const auto [wr, wc] = learner::metric_weight_shape(cfg.metric, d);
  for (std::size_t f = 0; f < cfg.perspectives; ++f) make("gl.user.w" + std::to_string(f), wr, wc);
  for (std::size_t f = 0; f < cfg.perspectives; ++f) make("gl.item.w" + std::to_string(f), wr, wc);
}

BoundParams RecModel::bind(Tape& tape) {
  BoundParams b;
  auto p = [&](const std::string& name) {
    Var v = tape.param(params_.get(name));
    b.all.push_back(v);
    return v;
  };
  b.user_table = p("P");
  b.item_table = p("Q");
  for (std::size_t l = 1; l <= cfg_.layers; ++l) {
    hgnn::LayerVars lv;
    lv.w_social = p(layer_name(l, "w_social"));
    lv.b_social = p(layer_name(l, "b_social"));
    for (std::size_t k = 1; k <= levels_; ++k) {
      lv.w_rating.push_back(p(layer_name(l, "w_rating" + std::to_string(k))));
      lv.b_rating.push_back(p(layer_name(l, "b_rating" + std::to_string(k))));
    }
    lv.w_similar = p(layer_name(l, "w_similar"));
    lv.b_similar = p(layer_name(l, "b_similar"));
    b.layers.push_back(std::move(lv));
  }
  b.readout = {p("readout.w"), p("readout.s"), p("readout.b")};
  for (std::size_t l = 0; l < 3; ++l) {
    b.mlp.weights.push_back(p("mlp.w" + std::to_string(l)));
    b.mlp.biases.push_back(p("mlp.b" + std::to_string(l)));
  }
  for (std::size_t f = 0; f < cfg_.perspectives; ++f) b.gl_user.push_back(p("gl.user.w" + std::to_string(f)));
  for (std::size_t f = 0; f < cfg_.perspectives; ++f) b.gl_item.push_back(p("gl.item.w" + std::to_string(f)));
  return b;
}

BatchOutput RecModel::forward(Tape& tape, const HeteroGraph& graph,
                              std::span<const data::Rating> batch,
                              const AnchorPair* anchors, bool training,
                              std::mt19937_64& rng) {
  if (batch.empty()) throw ContractError("forward: empty batch");
  if (graph.num_users() != n_users_ || graph.num_items() != n_items_) {
    throw ShapeError("forward: graph does not match the model's entity counts");
  }
  std::vector<std::size_t> raw_users, raw_items;
  Tensor targets(batch.size(), 1);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    raw_users.push_back(batch[i].user);
    raw_items.push_back(batch[i].item);
    targets[i] = batch[i].value;
  }
  const std::vector<std::size_t> users = distinct_in_order(raw_users);
  const std::vector<std::size_t> items = distinct_in_order(raw_items);

  BoundParams b = bind(tape);
  BatchOutput out;
  std::optional<hgnn::RefinedRows> rows_u, rows_i;
  if (cfg_.graph_learner) {
    const auto gl = cfg_.learner_config();
    if (anchors) {
      out.refined_users = learner::learn_subgraph_anchored(users, graph, anchors->users,
                                                           b.user_table, b.gl_user, gl);
      out.refined_items = learner::learn_subgraph_anchored(items, graph, anchors->items,
                                                           b.item_table, b.gl_item, gl);
    } else {
      out.refined_users = learner::learn_subgraph(users, NodeKind::kUser, graph,
                                                  b.user_table, b.gl_user, gl);
      out.refined_items = learner::learn_subgraph(items, NodeKind::kItem, graph,
                                                  b.item_table, b.gl_item, gl);
    }
    out.sim_ops = out.refined_users->sim_ops + out.refined_items->sim_ops;
    rows_u = hgnn::unweighted(*out.refined_users);
    rows_i = hgnn::unweighted(*out.refined_items);
  }

  hgnn::BatchSubgraph sg = hgnn::build_batch_subgraph(
      graph, rows_u ? &*rows_u : nullptr, rows_i ? &*rows_i : nullptr, users,
      items, cfg_.layers);
  hgnn::ForwardResult fwd = hgnn::hgnn_forward(sg, b.user_table, b.item_table,
                                               b.layers, cfg_.dropout, rng, training);
  Var p_star = predictor::layer_attention_readout(fwd.user_layers, b.readout);
  Var q_star = predictor::layer_attention_readout(fwd.item_layers, b.readout);

  std::unordered_map<std::size_t, std::size_t> user_pos, item_pos;
  for (std::size_t i = 0; i < users.size(); ++i) user_pos[users[i]] = i;
  for (std::size_t i = 0; i < items.size(); ++i) item_pos[items[i]] = i;
  std::vector<std::size_t> ui, vi;
  for (const auto& r : batch) {
    ui.push_back(user_pos.at(r.user));
    vi.push_back(item_pos.at(r.item));
  }
  out.raw = predictor::predict_rating(ops::gather_rows(p_star, ui),
                                      ops::gather_rows(q_star, vi), b.mlp,
                                      cfg_.dropout, rng, training);
  out.rating_loss = losses::rating_loss(out.raw, targets);
  if (!training) {
    out.loss = out.rating_loss;
    return out;
  }

  const losses::LossWeights w = cfg_.loss_weights();
  if (out.refined_users && w.gamma_u > 0) {
    out.user_graph_loss = losses::graph_learner_loss(
        out.refined_users->fused, ops::gather_rows(b.user_table, out.refined_users->targets), w);
  }
  if (out.refined_items && w.gamma_v > 0) {
    out.item_graph_loss = losses::graph_learner_loss(
        out.refined_items->fused, ops::gather_rows(b.item_table, out.refined_items->targets), w);
  }
  std::optional<Var> l2;
  if (w.eta > 0) l2 = l2_penalty(tape, b.all);
  out.loss = losses::hybrid_loss(out.rating_loss, out.user_graph_loss,
                                 out.item_graph_loss, l2, w);
  return out;
}

}  // namespace hetgl::app
