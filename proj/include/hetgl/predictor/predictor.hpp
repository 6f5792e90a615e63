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

#include <random>
#include <span>
#include <vector>

#include "hetgl/engine/ops.hpp"

namespace hetgl::predictor {

// Shared by users and items and by every layer.
struct ReadoutVars {
  Var w;     // D×D
  Var s;     // D×1
  Var bias;  // 1×D
};

inline constexpr double kAttentionFloor = 1e-12;

// Per-layer scores a_t = sᵀ·ReLU(W e_t + b), B×1 each.
std::vector<Var> layer_scores(std::span<const Var> layers, const ReadoutVars& vars);

// Σ_t α_t e_t with α_t = a⁺_t / max(Σ a⁺, 1e-12), a⁺ = max(a, 0); rows whose
// gated scores are all zero fall back to α_t = 1/(T+1).
Var layer_attention_readout(std::span<const Var> layers, const ReadoutVars& vars);

// [2D → D → D/2 → 1], ReLU between hidden layers, linear output.
struct MlpVars {
  std::vector<Var> weights;  // out×in
  std::vector<Var> biases;   // 1×out
};

// B×1 raw predictions for concatenated [p*, q*] rows. Dropout follows each
// hidden activation when training.
Var predict_rating(Var user_final, Var item_final, const MlpVars& mlp,
                   double dropout, std::mt19937_64& rng, bool training);

// Eval-mode output: raw predictions clamped to the rating range.
std::vector<double> clamp_predictions(const Tensor& raw, double lo, double hi);

}  // namespace hetgl::predictor
