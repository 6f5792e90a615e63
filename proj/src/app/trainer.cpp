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

#include "hetgl/app/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>

#include "hetgl/app/checkpoint.hpp"
#include "hetgl/errors.hpp"
#include "hetgl/learner/item_edges.hpp"

namespace hetgl::app {
namespace {

constexpr std::uint64_t kShuffleStream = 0x73687566;
constexpr std::uint64_t kDropoutStream = 0x64726f70;

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

nlohmann::json to_json(const MetricsRecord& r) {
  return {{"epoch", r.epoch}, {"split", r.split},     {"rmse", r.rmse},
          {"mae", r.mae},     {"seconds", r.seconds}, {"sim_ops", r.sim_ops}};
}

ErrorMetrics compute_metrics(std::span<const double> predictions,
                             std::span<const double> targets) {
  if (predictions.empty() || predictions.size() != targets.size()) {
    throw ContractError("metrics: need equally many predictions and targets");
  }
  double se = 0.0, ae = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - targets[i];
    se += d * d;
    ae += std::abs(d);
  }
  const double n = static_cast<double>(predictions.size());
  return {std::sqrt(se / n), ae / n};
}

std::optional<AnchorPair> draw_anchors(const TrainConfig& cfg, std::size_t n_users,
                                       std::size_t n_items, std::uint64_t epoch) {
  if (cfg.anchor_rate == 0.0 || !cfg.graph_learner) return std::nullopt;
  return AnchorPair{
      learner::sample_anchors(NodeKind::kUser, n_users, cfg.anchor_rate, epoch, cfg.seed),
      learner::sample_anchors(NodeKind::kItem, n_items, cfg.anchor_rate, epoch, cfg.seed)};
}

EvalResult evaluate(RecModel& model, const HeteroGraph& graph,
                    const data::DatasetBundle& bundle,
                    const std::vector<data::Rating>& part) {
  if (part.empty()) throw ContractError("evaluate: empty split");
  const auto t0 = Clock::now();
  const TrainConfig& cfg = model.config();
  const auto anchors = draw_anchors(cfg, model.n_users(), model.n_items(), kEvalEpoch);
  std::mt19937_64 unused(0);
  EvalResult res;
  std::vector<double> targets;
  for (std::size_t start = 0; start < part.size(); start += cfg.batch) {
    const std::size_t end = std::min(part.size(), start + cfg.batch);
    std::span<const data::Rating> batch(part.data() + start, end - start);
    Tape tape;
    BatchOutput out = model.forward(tape, graph, batch, anchors ? &*anchors : nullptr,
                                    false, unused);
    res.sim_ops += out.sim_ops;
    for (double p : predictor::clamp_predictions(out.raw.value(), bundle.scale.min(),
                                                 bundle.scale.max()))
      res.predictions.push_back(p);
    for (const auto& r : batch) targets.push_back(r.value);
  }
  res.metrics = compute_metrics(res.predictions, targets);
  res.n_evaluated = part.size();
  res.cold = bundle.count_cold(part);
  res.seconds = since(t0);
  return res;
}

ErrorMetrics global_mean_baseline(const data::DatasetBundle& bundle,
                                  const std::vector<data::Rating>& part) {
  const double mean = bundle.train_mean();
  std::vector<double> preds(part.size(), mean), targets;
  for (const auto& r : part) targets.push_back(r.value);
  return compute_metrics(preds, targets);
}

Trainer::Trainer(const TrainConfig& cfg, const data::DatasetBundle& bundle,
                 const HeteroGraph& graph)
    : cfg_(cfg),
      bundle_(bundle),
      graph_(graph),
      model_(cfg, bundle.users.size(), bundle.items.size(), bundle.scale.levels()),
      adam_(model_.params()) {
  if (bundle.train.empty()) throw ContractError("train: empty training split");
}

MetricsRecord Trainer::train_epoch(std::size_t epoch) {
  const auto t0 = Clock::now();
  std::vector<data::Rating> order = bundle_.train;
  std::mt19937_64 shuffle = substream(cfg_.seed, kShuffleStream, epoch);
  std::shuffle(order.begin(), order.end(), shuffle);
  std::mt19937_64 drop = substream(cfg_.seed, kDropoutStream, epoch);
  const auto anchors = draw_anchors(cfg_, model_.n_users(), model_.n_items(), epoch);

  MetricsRecord rec{epoch, "train", 0, 0, 0, 0};
  std::vector<double> preds, targets;
  std::size_t batch_id = 0;
  for (std::size_t start = 0; start < order.size(); start += cfg_.batch, ++batch_id) {
    const std::size_t end = std::min(order.size(), start + cfg_.batch);
    std::span<const data::Rating> batch(order.data() + start, end - start);
    Tape tape;
    BatchOutput out = model_.forward(tape, graph_, batch, anchors ? &*anchors : nullptr,
                                     true, drop);
    const double loss = out.loss.value().item();
    if (!std::isfinite(loss)) {
      throw NumericError("non-finite loss at epoch " + std::to_string(epoch) +
                         ", batch " + std::to_string(batch_id));
    }
    rec.sim_ops += out.sim_ops;
    model_.params().zero_grad();
    tape.backward(out.loss);
    try {
      adam_.step(model_.params(), cfg_.lr);
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " at epoch " + std::to_string(epoch) +
                         ", batch " + std::to_string(batch_id));
    }
    for (double p : predictor::clamp_predictions(out.raw.value(), bundle_.scale.min(),
                                                 bundle_.scale.max()))
      preds.push_back(p);
    for (const auto& r : batch) targets.push_back(r.value);
  }
  const ErrorMetrics m = compute_metrics(preds, targets);
  rec.rmse = m.rmse;
  rec.mae = m.mae;
  rec.seconds = since(t0);
  return rec;
}

FitResult Trainer::fit(const Callback& on_record) {
  FitResult res;
  std::vector<Tensor> best;
  auto snapshot = [&] {
    best.clear();
    for (std::size_t i = 0; i < model_.params().size(); ++i)
      best.push_back(model_.params()[i].value);
  };
  snapshot();
  std::size_t since_best = 0;
  for (std::size_t epoch = 1; epoch <= cfg_.epochs; ++epoch) {
    MetricsRecord train = train_epoch(epoch);
    res.history.push_back(train);
    if (on_record) on_record(train);
    res.epochs_run = epoch;
    if (bundle_.valid.empty()) {
      snapshot();
      res.best_epoch = epoch;
      continue;
    }
    EvalResult ev = evaluate(model_, graph_, bundle_, bundle_.valid);
    MetricsRecord valid{epoch, "valid", ev.metrics.rmse, ev.metrics.mae, ev.seconds, ev.sim_ops};
    res.history.push_back(valid);
    if (on_record) on_record(valid);
    if (ev.metrics.rmse < res.best_valid_rmse) {
      res.best_valid_rmse = ev.metrics.rmse;
      res.best_epoch = epoch;
      since_best = 0;
      snapshot();
    } else if (cfg_.patience > 0 && ++since_best >= cfg_.patience) {
      break;
    }
  }
  for (std::size_t i = 0; i < best.size(); ++i) model_.params()[i].value = best[i];
  return res;
}

FitResult run_training(const TrainConfig& cfg, const RunPaths& paths, std::ostream& log) {
  cfg.validate();
  const data::DatasetBundle bundle =
      data::load_bundle(paths.ratings, paths.links, {}, cfg.seed);
  const HeteroGraph graph = learner::build_global_graph(bundle, cfg.k_items);
  std::filesystem::create_directories(paths.out_dir);
  {
    std::ofstream os(paths.out_dir / "config.json");
    os << to_json(cfg).dump(2) << '\n';
  }
  std::ofstream metrics(paths.out_dir / "metrics.jsonl");
  auto emit = [&](const MetricsRecord& r) {
    const std::string line = to_json(r).dump();
    metrics << line << '\n';
    metrics.flush();
    log << line << '\n';
    log.flush();
  };

  Trainer trainer(cfg, bundle, graph);
  FitResult res = trainer.fit(emit);
  if (!bundle.test.empty()) {
    EvalResult test = evaluate(trainer.model(), graph, bundle, bundle.test);
    MetricsRecord rec{res.best_epoch, "test", test.metrics.rmse, test.metrics.mae,
                      test.seconds, test.sim_ops};
    res.history.push_back(rec);
    emit(rec);
  }
  CheckpointManifest manifest;
  manifest.config = cfg;
  manifest.ratings_path = std::filesystem::absolute(paths.ratings).string();
  manifest.links_path = std::filesystem::absolute(paths.links).string();
  manifest.scale = bundle.scale.values();
  manifest.n_users = bundle.users.size();
  manifest.n_items = bundle.items.size();
  manifest.best_epoch = res.best_epoch;
  save_checkpoint(paths.out_dir / "checkpoint.bin", manifest, trainer.model().params());
  return res;
}

RestoredRun restore_run(const std::filesystem::path& checkpoint,
                        const std::filesystem::path& ratings_override,
                        const std::filesystem::path& links_override) {
  const Checkpoint ck = load_checkpoint(checkpoint);
  const CheckpointManifest& m = ck.manifest;
  RestoredRun run;
  run.config = m.config;
  run.best_epoch = m.best_epoch;
  run.bundle = data::load_bundle(
      ratings_override.empty() ? std::filesystem::path(m.ratings_path) : ratings_override,
      links_override.empty() ? std::filesystem::path(m.links_path) : links_override, {},
      m.config.seed);
  if (run.bundle.users.size() != m.n_users || run.bundle.items.size() != m.n_items ||
      run.bundle.scale.values() != m.scale) {
    throw ContractError("checkpoint " + checkpoint.string() +
                        ": data does not match the run it was trained on");
  }
  run.graph = learner::build_global_graph(run.bundle, m.config.k_items);
  run.model = std::make_unique<RecModel>(m.config, m.n_users, m.n_items, m.scale.size());
  apply_checkpoint(ck, run.model->params());
  return run;
}

}  // namespace hetgl::app
