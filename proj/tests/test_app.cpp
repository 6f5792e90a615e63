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

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hetgl/app/checkpoint.hpp"
#include "hetgl/app/trainer.hpp"
#include "hetgl/data/synthetic.hpp"
#include "hetgl/errors.hpp"
#include "hetgl/learner/item_edges.hpp"

namespace hetgl {
namespace {

namespace fs = std::filesystem;
using app::TrainConfig;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hetgl_app_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

TrainConfig tiny_config() {
  TrainConfig c;
  c.dim = 8;
  c.batch = 64;
  c.layers = 2;
  c.trunc = 5;
  c.k_items = 5;
  c.epochs = 3;
  c.patience = 0;
  c.lr = 0.01;
  c.init_std = 0.1;
  return c;
}

struct World {
  data::DatasetBundle bundle;
  HeteroGraph graph;
};

World tiny_world(std::uint64_t seed, std::size_t k_items = 5) {
  data::SyntheticConfig sc;
  sc.n_users = 40;
  sc.n_items = 50;
  sc.n_ratings = 600;
  sc.n_links = 60;
  sc.seed = seed;
  const auto syn = data::generate_synthetic(sc);
  World w{data::make_bundle(syn.ratings, data::LinkFile{syn.links, 0}, {}, seed), HeteroGraph()};
  w.graph = learner::build_global_graph(w.bundle, k_items);
  return w;
}

TEST(Config, JsonRoundTrip) {
  TrainConfig c;
  c.dim = 16;
  c.metric = learner::SimilarityMetric::kAddAttention;
  c.anchor_rate = 0.05;
  c.graph_learner = false;
  c.seed = 99;
  const TrainConfig back = app::config_from_json(app::to_json(c));
  EXPECT_EQ(app::to_json(back), app::to_json(c));
}

TEST(Config, MissingKeysKeepDefaults) {
  const TrainConfig c = app::config_from_json(nlohmann::json{{"lr", 0.5}});
  EXPECT_EQ(c.lr, 0.5);
  EXPECT_EQ(c.dim, TrainConfig{}.dim);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(app::config_from_json(nlohmann::json{{"learning_rate", 0.1}}), ContractError);
  EXPECT_THROW(app::config_from_json(nlohmann::json{{"metric", "dot"}}), ContractError);
  auto invalid = [](auto mutate) {
    TrainConfig c;
    mutate(c);
    EXPECT_THROW(c.validate(), ContractError);
  };
  invalid([](TrainConfig& c) { c.layers = 0; });
  invalid([](TrainConfig& c) { c.layers = 5; });
  invalid([](TrainConfig& c) { c.dropout = 1.0; });
  invalid([](TrainConfig& c) { c.lambda_w = 1.5; });
  invalid([](TrainConfig& c) { c.anchor_rate = -0.1; });
  invalid([](TrainConfig& c) { c.gamma_u = -1; });
  invalid([](TrainConfig& c) { c.lr = 0; });
  EXPECT_NO_THROW(TrainConfig{}.validate());
}

TEST(Metrics, Examples) {
  const std::vector<double> p{1, 2}, t{2, 4};
  const auto m = app::compute_metrics(p, t);
  EXPECT_NEAR(m.rmse, std::sqrt(2.5), 1e-15);
  EXPECT_DOUBLE_EQ(m.mae, 1.5);
  const std::vector<double> same{3, 4};
  EXPECT_EQ(app::compute_metrics(same, same).rmse, 0.0);
  // A raw 6.0 clamped to the top of [1,5] against a 5.0 target.
  const auto clamped = predictor::clamp_predictions(Tensor(1, 1, {6.0}), 1.0, 5.0);
  const std::vector<double> five{5.0};
  EXPECT_EQ(app::compute_metrics(clamped, five).rmse, 0.0);
  EXPECT_THROW(app::compute_metrics({}, {}), ContractError);
  EXPECT_THROW(app::compute_metrics(p, std::span<const double>(same).subspan(0, 1)), ContractError);
}

TEST(Metrics, RecordJsonFields) {
  const auto j = app::to_json(app::MetricsRecord{3, "valid", 1.0, 0.5, 0.25, 42});
  for (const char* k : {"epoch", "split", "rmse", "mae", "seconds", "sim_ops"})
    EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["sim_ops"], 42);
}

TEST(Anchors, NoneForFullLearnerOrDisabled) {
  TrainConfig c;
  EXPECT_FALSE(app::draw_anchors(c, 10, 10, 1));
  c.anchor_rate = 0.5;
  EXPECT_TRUE(app::draw_anchors(c, 10, 10, 1));
  c.graph_learner = false;
  EXPECT_FALSE(app::draw_anchors(c, 10, 10, 1));
}

TEST(Checkpoint, RoundTripIsExact) {
  const fs::path dir = scratch("ckpt");
  TrainConfig c = tiny_config();
  c.seed = 5;
  app::RecModel a(c, 7, 9, 5);
  app::CheckpointManifest m{c, "r.tsv", "l.tsv", {1, 2, 3, 4, 5}, 7, 9, 4};
  app::save_checkpoint(dir / "ck.bin", m, a.params());
  const auto ck = app::load_checkpoint(dir / "ck.bin");
  EXPECT_EQ(app::to_json(ck.manifest), app::to_json(m));
  TrainConfig other = c;
  other.seed = 6;
  app::RecModel b(other, 7, 9, 5);
  app::apply_checkpoint(ck, b.params());
  ASSERT_EQ(a.params().size(), b.params().size());
  for (std::size_t i = 0; i < a.params().size(); ++i)
    EXPECT_EQ(a.params()[i].value, b.params()[i].value) << a.params()[i].name;
}

TEST(Checkpoint, CorruptionIsRejected) {
  const fs::path dir = scratch("ckpt_bad");
  const TrainConfig c = tiny_config();
  app::RecModel model(c, 4, 4, 5);
  app::save_checkpoint(dir / "ok.bin", {c, "r", "l", {1, 2, 3, 4, 5}, 4, 4, 1}, model.params());
  std::string bytes;
  {
    std::ifstream in(dir / "ok.bin", std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream(dir / name, std::ios::binary) << content;
    return dir / name;
  };
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  std::string bad_version = bytes;
  bad_version[8] = 9;
  EXPECT_THROW(app::load_checkpoint(write("magic.bin", bad_magic)), ParseError);
  EXPECT_THROW(app::load_checkpoint(write("version.bin", bad_version)), ParseError);
  EXPECT_THROW(app::load_checkpoint(write("short.bin", bytes.substr(0, bytes.size() - 3))),
               ParseError);
  EXPECT_THROW(app::load_checkpoint(write("long.bin", bytes + "x")), ParseError);
  EXPECT_THROW(app::load_checkpoint(dir / "missing.bin"), ParseError);

  // Applying to a model of another shape.
  const auto ck = app::load_checkpoint(dir / "ok.bin");
  app::RecModel wider(c, 5, 4, 5);
  EXPECT_THROW(app::apply_checkpoint(ck, wider.params()), ShapeError);
  TrainConfig deeper = c;
  deeper.layers = 3;
  app::RecModel more(deeper, 4, 4, 5);
  EXPECT_THROW(app::apply_checkpoint(ck, more.params()), ContractError);
}

std::vector<double> trained_predictions(const TrainConfig& c, const World& w) {
  app::Trainer t(c, w.bundle, w.graph);
  for (std::size_t e = 1; e <= c.epochs; ++e) t.train_epoch(e);
  return app::evaluate(t.model(), w.graph, w.bundle, w.bundle.test).predictions;
}

TEST(Trainer, SameSeedSameRun) {
  const World w = tiny_world(3);
  TrainConfig c = tiny_config();
  c.anchor_rate = 0.3;
  app::Trainer a(c, w.bundle, w.graph), b(c, w.bundle, w.graph);
  const auto ha = a.fit().history, hb = b.fit().history;
  ASSERT_EQ(ha.size(), hb.size());
  for (std::size_t i = 0; i < ha.size(); ++i) {
    EXPECT_EQ(ha[i].rmse, hb[i].rmse);
    EXPECT_EQ(ha[i].sim_ops, hb[i].sim_ops);
  }
  for (std::size_t i = 0; i < a.model().params().size(); ++i)
    EXPECT_EQ(a.model().params()[i].value, b.model().params()[i].value);
}

TEST(Trainer, PassThroughLearnerEqualsNoLearner) {
  // λ_w = 0 keeps exactly the initial neighbors when L covers every degree;
  // with γ = 0 nothing else depends on the learner.
  const World w = tiny_world(4);
  TrainConfig on = tiny_config();
  on.lambda_w = 0.0;
  on.gamma_u = on.gamma_v = 0.0;
  on.trunc = 1000;
  TrainConfig off = on;
  off.graph_learner = false;
  on.epochs = off.epochs = 2;
  const auto a = trained_predictions(on, w), b = trained_predictions(off, w);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a[i], b[i]) << i;
}

Tensor gl_user_grad(double gamma_u, const World& w) {
  TrainConfig c = tiny_config();
  c.gamma_u = gamma_u;
  c.gamma_v = 0.0;
  c.eta = 0.0;
  app::RecModel model(c, w.bundle.users.size(), w.bundle.items.size(), w.bundle.scale.levels());
  Tape tape;
  std::mt19937_64 rng(0);
  const std::span<const data::Rating> batch(w.bundle.train.data(), 64);
  auto out = model.forward(tape, w.graph, batch, nullptr, true, rng);
  model.params().zero_grad();
  tape.backward(out.loss);
  return model.params().get("gl.user.w0").grad;
}

TEST(Model, GraphLossIsTheOnlyPathToMetricWeights) {
  const World w = tiny_world(5);
  double with = 0, without = 0;
  for (double v : gl_user_grad(0.5, w).data()) with += v * v;
  for (double v : gl_user_grad(0.0, w).data()) without += v * v;
  EXPECT_GT(with, 0.0);
  EXPECT_EQ(without, 0.0);
}

TEST(Model, LossTermsOnlyWhenTraining) {
  const World w = tiny_world(6);
  app::RecModel model(tiny_config(), w.bundle.users.size(), w.bundle.items.size(),
                      w.bundle.scale.levels());
  const std::span<const data::Rating> batch(w.bundle.train.data(), 32);
  std::mt19937_64 rng(0);
  Tape t1, t2;
  const auto train = model.forward(t1, w.graph, batch, nullptr, true, rng);
  const auto eval = model.forward(t2, w.graph, batch, nullptr, false, rng);
  EXPECT_TRUE(train.user_graph_loss && train.item_graph_loss);
  EXPECT_FALSE(eval.user_graph_loss || eval.item_graph_loss);
  EXPECT_EQ(eval.loss.value().item(), eval.rating_loss.value().item());
  const TrainConfig& c = model.config();
  const double composed = train.rating_loss.value().item() +
                          c.gamma_u * train.user_graph_loss->value().item() +
                          c.gamma_v * train.item_graph_loss->value().item() +
                          c.eta * l2_penalty_value(model.params());
  EXPECT_NEAR(train.loss.value().item(), composed, 1e-12);
  EXPECT_GT(train.sim_ops, 0u);
}

TEST(Trainer, NonFiniteLossNamesEpochAndBatch) {
  const World w = tiny_world(7);
  app::Trainer t(tiny_config(), w.bundle, w.graph);
  t.model().params().get("P").value.fill(std::nan(""));
  try {
    t.train_epoch(1);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("epoch 1, batch 0"), std::string::npos) << e.what();
  }
}

TEST(Trainer, ToyTrainingErrorDrops) {
  int improved = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const World w = tiny_world(seed);
    TrainConfig c = tiny_config();
    c.seed = seed;
    c.dropout = 0.0;
    c.epochs = 8;
    app::Trainer t(c, w.bundle, w.graph);
    const double first = t.train_epoch(1).rmse;
    double last = first;
    for (std::size_t e = 2; e <= c.epochs; ++e) last = t.train_epoch(e).rmse;
    if (last < first) ++improved;
  }
  EXPECT_GE(improved, 3);
}

TEST(Trainer, EarlyStoppingRestoresBestEpoch) {
  const World w = tiny_world(8);
  TrainConfig c = tiny_config();
  c.epochs = 12;
  c.patience = 2;
  c.lr = 0.05;
  app::Trainer t(c, w.bundle, w.graph);
  const auto res = t.fit();
  double best = 1e300;
  std::size_t best_epoch = 0;
  for (const auto& r : res.history)
    if (r.split == "valid" && r.rmse < best) best = r.rmse, best_epoch = r.epoch;
  EXPECT_EQ(res.best_epoch, best_epoch);
  EXPECT_EQ(res.best_valid_rmse, best);
  EXPECT_LE(res.epochs_run, best_epoch + c.patience);
  const auto now = app::evaluate(t.model(), w.graph, w.bundle, w.bundle.valid);
  EXPECT_EQ(now.metrics.rmse, best);
}

TEST(Run, WritesArtifactsAndRestores) {
  const fs::path dir = scratch("run");
  data::SyntheticConfig sc;
  sc.n_users = 40;
  sc.n_items = 50;
  sc.n_ratings = 600;
  sc.n_links = 60;
  data::write_synthetic(sc, data::generate_synthetic(sc), dir / "data");
  TrainConfig c = tiny_config();
  c.epochs = 2;
  std::ostringstream log;
  const auto res =
      app::run_training(c, {dir / "data/ratings.tsv", dir / "data/links.tsv", dir / "out"}, log);
  EXPECT_TRUE(fs::exists(dir / "out/config.json"));
  EXPECT_TRUE(fs::exists(dir / "out/checkpoint.bin"));
  std::ifstream metrics(dir / "out/metrics.jsonl");
  std::string line, last;
  std::size_t lines = 0;
  while (std::getline(metrics, line)) ++lines, last = line;
  EXPECT_EQ(lines, 5u);  // train + valid per epoch, then test
  const auto test = nlohmann::json::parse(last);
  EXPECT_EQ(test["split"], "test");
  EXPECT_EQ(test["epoch"], res.best_epoch);

  const auto run = app::restore_run(dir / "out/checkpoint.bin");
  const auto again = app::evaluate(*run.model, run.graph, run.bundle, run.bundle.test);
  EXPECT_DOUBLE_EQ(again.metrics.rmse, test["rmse"].get<double>());

  // Data that no longer matches the checkpoint.
  sc.n_users = 45;
  data::write_synthetic(sc, data::generate_synthetic(sc), dir / "other");
  EXPECT_THROW(app::restore_run(dir / "out/checkpoint.bin", dir / "other/ratings.tsv",
                                dir / "other/links.tsv"),
               ContractError);
}

int cli(const std::string& args) {
  const std::string cmd = std::string(HETGL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("cli");
  const std::string d = dir.string();
  EXPECT_NE(cli(""), 0);
  EXPECT_NE(cli("frobnicate"), 0);
  EXPECT_EQ(cli("synth --out " + d + "/data --users 40 --items 50 --ratings 600 --links 60"), 0);
  EXPECT_NE(cli("train --ratings " + d + "/nope.tsv --links " + d + "/data/links.tsv --out " + d +
                "/o"),
            0);
  EXPECT_NE(cli("train --ratings " + d + "/data/ratings.tsv --links " + d +
                "/data/links.tsv --out " + d + "/o --layers 9"),
            0);
  const std::string train = "train --ratings " + d + "/data/ratings.tsv --links " + d +
                            "/data/links.tsv --out " + d + "/o --dim 8 --epochs 1 --k_items 5";
  ASSERT_EQ(cli(train), 0);
  EXPECT_EQ(cli("eval --checkpoint " + d + "/o/checkpoint.bin --split valid"), 0);
  EXPECT_NE(cli("eval --checkpoint " + d + "/o/checkpoint.bin --split dev"), 0);
  EXPECT_EQ(cli("predict --checkpoint " + d + "/o/checkpoint.bin --user " +
                data::synthetic_user_id(0) + " --item " + data::synthetic_item_id(0)),
            0);
  EXPECT_NE(cli("predict --checkpoint " + d + "/o/checkpoint.bin --user nobody --item x"), 0);
  EXPECT_NE(cli("eval --checkpoint " + d + "/data/ratings.tsv"), 0);
}

}  // namespace
}  // namespace hetgl
