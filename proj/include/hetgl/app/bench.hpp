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
#include <span>
#include <vector>

#include "json.hpp"

namespace hetgl::app {

struct BenchConfig {
  std::vector<std::size_t> sizes = {2000, 4000, 8000};
  std::vector<double> taus = {0.0, 0.05, 0.1, 1.0};  // 0 is the full learner
  std::size_t batches = 2;
  std::size_t batch = 128;
  std::size_t dim = 16;
  std::uint64_t seed = 1;
};

struct BenchRow {
  std::size_t size = 0;     // requested N
  std::size_t n_users = 0;  // users that actually occur in the generated data
  double tau = 0.0;
  std::uint64_t sim_ops = 0;  // summed over users and items, all batches
  double seconds = 0.0;
};

nlohmann::json to_json(const BenchRow& r);

// Synthetic worlds with N users and N items (4N ratings, 2N links). For
// each τ, the same batches of target users and items are pushed through
// the learner and similarity ops and wall time are recorded.
std::vector<BenchRow> scaling_bench(const BenchConfig& cfg);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Ordinary least squares y ≈ slope·x + intercept.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace hetgl::app
