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

#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "hetgl/app/bench.hpp"
#include "hetgl/app/checkpoint.hpp"
#include "hetgl/app/trainer.hpp"
#include "hetgl/data/synthetic.hpp"
#include "hetgl/errors.hpp"

namespace {

using hetgl::app::TrainConfig;

void add_config_flags(CLI::App& cmd, TrainConfig& c, std::string& metric) {
  cmd.add_option("--dim", c.dim, "embedding dimension")->capture_default_str();
  cmd.add_option("--batch", c.batch, "batch size")->capture_default_str();
  cmd.add_option("--lr", c.lr, "Adam learning rate")->capture_default_str();
  cmd.add_option("--dropout", c.dropout, "dropout probability")->capture_default_str();
  cmd.add_option("--layers", c.layers, "HGNN layers (1..4)")->capture_default_str();
  cmd.add_option("--trunc", c.trunc, "neighbors kept per refined row")->capture_default_str();
  cmd.add_option("--perspectives", c.perspectives, "similarity perspectives")->capture_default_str();
  cmd.add_option("--lambda_w", c.lambda_w, "weight of the learned similarity")->capture_default_str();
  cmd.add_option("--metric", metric, "weighted_cosine | attention | add_attention")
      ->capture_default_str();
  cmd.add_option("--k_items", c.k_items, "similar items per item")->capture_default_str();
  cmd.add_option("--anchor_rate", c.anchor_rate, "anchor fraction, 0 = full learner")
      ->capture_default_str();
  cmd.add_option("--beta", c.beta, "smoothness weight")->capture_default_str();
  cmd.add_option("--beta1", c.beta1, "connectivity weight")->capture_default_str();
  cmd.add_option("--beta2", c.beta2, "sparsity weight")->capture_default_str();
  cmd.add_option("--gamma_u", c.gamma_u, "user graph loss weight")->capture_default_str();
  cmd.add_option("--gamma_v", c.gamma_v, "item graph loss weight")->capture_default_str();
  cmd.add_option("--eta", c.eta, "L2 weight")->capture_default_str();
  cmd.add_option("--epochs", c.epochs, "maximum epochs")->capture_default_str();
  cmd.add_option("--seed", c.seed, "seed for split, init and sampling")->capture_default_str();
  cmd.add_option("--patience", c.patience, "early stopping patience, 0 disables")
      ->capture_default_str();
  cmd.add_option("--graph_learner", c.graph_learner, "enable structure learning")
      ->capture_default_str();
  cmd.add_option("--init_std", c.init_std, "stddev of the initial weights")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hetgl: social recommendation with graph structure learning"};
  app.require_subcommand(1);

  TrainConfig cfg;
  std::string metric = "weighted_cosine";
  std::string config_file;
  hetgl::app::RunPaths paths;
  auto* train = app.add_subcommand("train", "train a model and write a checkpoint");
  train->add_option("--config", config_file, "JSON config; flags given on the command line win");
  train->add_option("--ratings", paths.ratings, "ratings TSV")->required();
  train->add_option("--links", paths.links, "social links TSV")->required();
  train->add_option("--out", paths.out_dir, "output directory")->required();
  add_config_flags(*train, cfg, metric);

  std::string checkpoint, split = "test", ratings_override, links_override;
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a split");
  eval->add_option("--checkpoint", checkpoint)->required();
  eval->add_option("--split", split)->check(CLI::IsMember({"train", "valid", "test"}))
      ->capture_default_str();
  eval->add_option("--ratings", ratings_override, "override the checkpoint's ratings path");
  eval->add_option("--links", links_override, "override the checkpoint's links path");

  std::string user, item;
  auto* predict = app.add_subcommand("predict", "predict one user-item rating");
  predict->add_option("--checkpoint", checkpoint)->required();
  predict->add_option("--user", user)->required();
  predict->add_option("--item", item)->required();
  predict->add_option("--ratings", ratings_override, "override the checkpoint's ratings path");
  predict->add_option("--links", links_override, "override the checkpoint's links path");

  hetgl::data::SyntheticConfig sc;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "write a synthetic dataset");
  synth->add_option("--out", synth_out)->required();
  synth->add_option("--users", sc.n_users)->capture_default_str();
  synth->add_option("--items", sc.n_items)->capture_default_str();
  synth->add_option("--ratings", sc.n_ratings)->capture_default_str();
  synth->add_option("--links", sc.n_links)->capture_default_str();
  synth->add_option("--noise_frac", sc.noise_frac)->capture_default_str();
  synth->add_option("--seed", sc.seed)->capture_default_str();

  hetgl::app::BenchConfig bc;
  auto* bench = app.add_subcommand("bench", "similarity-op scaling table");
  bench->add_option("--sizes", bc.sizes)->capture_default_str();
  bench->add_option("--taus", bc.taus, "anchor rates, 0 = full learner")->capture_default_str();
  bench->add_option("--batches", bc.batches)->capture_default_str();
  bench->add_option("--batch", bc.batch)->capture_default_str();
  bench->add_option("--dim", bc.dim)->capture_default_str();
  bench->add_option("--seed", bc.seed)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      TrainConfig resolved = cfg;
      if (!config_file.empty()) {
        std::ifstream in(config_file);
        if (!in) throw hetgl::ParseError(config_file + ": cannot open");
        resolved = hetgl::app::config_from_json(nlohmann::json::parse(in));
        // Re-apply explicit flags over the file.
        const nlohmann::json flags = hetgl::app::to_json(cfg);
        nlohmann::json merged = hetgl::app::to_json(resolved);
        for (const auto* opt : train->get_options())
          if (opt->count() > 0) {
            const std::string key = opt->get_name().substr(2);
            if (flags.contains(key)) merged[key] = flags[key];
          }
        if (train->get_option("--metric")->count() > 0) merged["metric"] = metric;
        resolved = hetgl::app::config_from_json(merged);
      } else {
        resolved.metric = hetgl::learner::parse_metric(metric);
      }
      hetgl::app::run_training(resolved, paths, std::cout);
    } else if (*eval) {
      auto run = hetgl::app::restore_run(checkpoint, ratings_override, links_override);
      const auto& part = split == "train" ? run.bundle.train
                         : split == "valid" ? run.bundle.valid
                                            : run.bundle.test;
      const auto res = hetgl::app::evaluate(*run.model, run.graph, run.bundle, part);
      nlohmann::json rec = hetgl::app::to_json(hetgl::app::MetricsRecord{
          run.best_epoch, split, res.metrics.rmse, res.metrics.mae, res.seconds, res.sim_ops});
      rec["n_evaluated"] = res.n_evaluated;
      rec["n_cold"] = res.cold;
      std::cout << rec.dump() << '\n';
    } else if (*predict) {
      auto run = hetgl::app::restore_run(checkpoint, ratings_override, links_override);
      const auto u = run.bundle.users.find(user);
      const auto v = run.bundle.items.find(item);
      if (!u) throw hetgl::ContractError("unknown user id: " + user);
      if (!v) throw hetgl::ContractError("unknown item id: " + item);
      const std::vector<hetgl::data::Rating> one{{*u, *v, run.bundle.scale.min()}};
      const auto res = hetgl::app::evaluate(*run.model, run.graph, run.bundle, one);
      std::cout << nlohmann::json{{"user", user}, {"item", item},
                                  {"prediction", res.predictions.front()}}.dump()
                << '\n';
    } else if (*synth) {
      const auto data = hetgl::data::generate_synthetic(sc);
      hetgl::data::write_synthetic(sc, data, synth_out);
    } else if (*bench) {
      for (const auto& row : hetgl::app::scaling_bench(bc))
        std::cout << hetgl::app::to_json(row).dump() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "hetgl: " << e.what() << '\n';
    return EXIT_FAILURE;
  }
  return EXIT_SUCCESS;
}
