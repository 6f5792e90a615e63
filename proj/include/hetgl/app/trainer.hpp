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
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "hetgl/app/model.hpp"

namespace hetgl::app {

// One line of the metrics stream.
struct MetricsRecord {
  std::size_t epoch = 0;
  std::string split;
  double rmse = 0.0;
  double mae = 0.0;
  double seconds = 0.0;
  std::uint64_t sim_ops = 0;
};

nlohmann::json to_json(const MetricsRecord& r);

struct ErrorMetrics {
  double rmse = 0.0;
  double mae = 0.0;
};

// Throws ContractError on empty or mismatched inputs.
ErrorMetrics compute_metrics(std::span<const double> predictions,
                             std::span<const double> targets);

// Anchor draws at evaluation use this epoch tag.
inline constexpr std::uint64_t kEvalEpoch = std::numeric_limits<std::uint64_t>::max();

// Anchor sets for an epoch, or none when the full learner is configured.
std::optional<AnchorPair> draw_anchors(const TrainConfig& cfg, std::size_t n_users,
                                       std::size_t n_items, std::uint64_t epoch);

struct EvalResult {
  ErrorMetrics metrics;
  std::vector<double> predictions;  // clamped, in split order
  std::size_t n_evaluated = 0;
  std::size_t cold = 0;
  std::uint64_t sim_ops = 0;
  double seconds = 0.0;
};

// Deterministic pass over `part` in batches, no dropout, predictions
// clamped to the rating range.
EvalResult evaluate(RecModel& model, const HeteroGraph& graph,
                    const data::DatasetBundle& bundle,
                    const std::vector<data::Rating>& part);

// Predicting the training mean for every rating.
ErrorMetrics global_mean_baseline(const data::DatasetBundle& bundle,
                                  const std::vector<data::Rating>& part);

struct FitResult {
  std::vector<MetricsRecord> history;
  std::size_t best_epoch = 0;
  double best_valid_rmse = std::numeric_limits<double>::infinity();
  std::size_t epochs_run = 0;
};

class Trainer {
 public:
  using Callback = std::function<void(const MetricsRecord&)>;

  Trainer(const TrainConfig& cfg, const data::DatasetBundle& bundle,
          const HeteroGraph& graph);

  // Runs up to cfg.epochs epochs with early stopping on validation RMSE and
  // leaves the best parameters in the model. Throws NumericError naming
  // the epoch and batch on a non-finite loss.
  FitResult fit(const Callback& on_record = {});

  // One training epoch; returns the train-split record.
  MetricsRecord train_epoch(std::size_t epoch);

  RecModel& model() { return model_; }
  const data::DatasetBundle& bundle() const { return bundle_; }
  const HeteroGraph& graph() const { return graph_; }

 private:
  TrainConfig cfg_;
  const data::DatasetBundle& bundle_;
  const HeteroGraph& graph_;
  RecModel model_;
  AdamState adam_;
};

struct RunPaths {
  std::filesystem::path ratings;
  std::filesystem::path links;
  std::filesystem::path out_dir;
};

// Loads the data, trains, writes config.json, metrics.jsonl and
// checkpoint.bin under out_dir, and streams every record to `log` as it is
// produced. Finishes with a test-split record for the best epoch.
FitResult run_training(const TrainConfig& cfg, const RunPaths& paths,
                       std::ostream& log);

// A trained model with the data it was trained on.
struct RestoredRun {
  TrainConfig config;
  data::DatasetBundle bundle;
  HeteroGraph graph;
  std::unique_ptr<RecModel> model;
  std::size_t best_epoch = 0;
};

// Reloads the checkpoint and rebuilds the split and graph from the data
// paths in its manifest, or from the given overrides when non-empty.
// Throws ContractError if the data no longer matches the checkpoint.
RestoredRun restore_run(const std::filesystem::path& checkpoint,
                        const std::filesystem::path& ratings_override = {},
                        const std::filesystem::path& links_override = {});

}  // namespace hetgl::app
