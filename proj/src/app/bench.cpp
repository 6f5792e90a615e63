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

#include "hetgl/app/bench.hpp"

#include <chrono>

#include "hetgl/app/model.hpp"
#include "hetgl/data/synthetic.hpp"
#include "hetgl/errors.hpp"
#include "hetgl/learner/item_edges.hpp"

namespace hetgl::app {

nlohmann::json to_json(const BenchRow& r) {
  return {{"size", r.size}, {"N", r.n_users}, {"tau", r.tau}, {"ops", r.sim_ops}, {"seconds", r.seconds}};
}

std::vector<BenchRow> scaling_bench(const BenchConfig& cfg) {
  std::vector<BenchRow> rows;
  for (std::size_t n : cfg.sizes) {
    data::SyntheticConfig sc;
    sc.n_users = n;
    sc.n_items = n;
    sc.n_ratings = 4 * n;
    sc.n_links = 2 * n;
    sc.seed = cfg.seed;
    const data::SyntheticData syn = data::generate_synthetic(sc);
    const data::DatasetBundle bundle =
        data::make_bundle(syn.ratings, {syn.links, 0}, {}, cfg.seed);
    const HeteroGraph graph = learner::build_global_graph(bundle, 20);

    TrainConfig tc;
    tc.dim = cfg.dim;
    tc.layers = 1;
    tc.seed = cfg.seed;
    RecModel model(tc, bundle.users.size(), bundle.items.size(), bundle.scale.levels());

    std::vector<std::vector<std::size_t>> user_batches, item_batches;
    for (std::size_t b = 0; b < cfg.batches; ++b) {
      const std::size_t start = b * cfg.batch;
      if (start >= bundle.train.size()) break;
      const std::size_t end = std::min(bundle.train.size(), start + cfg.batch);
      std::vector<std::size_t> us, is;
      for (std::size_t i = start; i < end; ++i) {
        us.push_back(bundle.train[i].user);
        is.push_back(bundle.train[i].item);
      }
      user_batches.push_back(distinct_in_order(us));
      item_batches.push_back(distinct_in_order(is));
    }

    for (double tau : cfg.taus) {
      BenchRow row{n, bundle.users.size(), tau, 0, 0.0};
      const auto t0 = std::chrono::steady_clock::now();
      for (std::size_t b = 0; b < user_batches.size(); ++b) {
        Tape tape;
        BoundParams p = model.bind(tape);
        const auto gl = tc.learner_config();
        if (tau == 0.0) {
          row.sim_ops += learner::learn_subgraph(user_batches[b], NodeKind::kUser, graph,
                                                 p.user_table, p.gl_user, gl).sim_ops;
          row.sim_ops += learner::learn_subgraph(item_batches[b], NodeKind::kItem, graph,
                                                 p.item_table, p.gl_item, gl).sim_ops;
        } else {
          const auto ua = learner::sample_anchors(NodeKind::kUser, bundle.users.size(), tau, b, cfg.seed);
          const auto ia = learner::sample_anchors(NodeKind::kItem, bundle.items.size(), tau, b, cfg.seed);
          row.sim_ops += learner::learn_subgraph_anchored(user_batches[b], graph, ua,
                                                          p.user_table, p.gl_user, gl).sim_ops;
          row.sim_ops += learner::learn_subgraph_anchored(item_batches[b], graph, ia,
                                                          p.item_table, p.gl_item, gl).sim_ops;
        }
      }
      row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      rows.push_back(row);
    }
  }
  return rows;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ContractError("fit_line: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw ContractError("fit_line: x has no spread");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    ss_res += r * r;
  }
  f.r2 = syy == 0 ? 1.0 : 1.0 - ss_res / syy;
  return f;
}

}  // namespace hetgl::app
