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

#include "hetgl/predictor/predictor.hpp"

#include <algorithm>

#include "hetgl/errors.hpp"

namespace hetgl::predictor {

std::vector<Var> layer_scores(std::span<const Var> layers, const ReadoutVars& vars) {
  std::vector<Var> scores;
  scores.reserve(layers.size());
  for (const Var& e : layers) {
    Var hidden = ops::relu(ops::add_row_vector(ops::matmul_nt(e, vars.w), vars.bias));
    scores.push_back(ops::matmul(hidden, vars.s));
  }
  return scores;
}

Var layer_attention_readout(std::span<const Var> layers, const ReadoutVars& vars) {
  if (layers.empty()) throw ContractError("readout: empty layer list");
  const std::size_t rows = layers.front().rows();
  const std::size_t count = layers.size();
  Tape& tape = layers.front().tape();

  std::vector<Var> gated;
  for (const Var& a : layer_scores(layers, vars)) gated.push_back(ops::relu(a));
  Var total = gated.front();
  for (std::size_t t = 1; t < count; ++t) total = ops::add(total, gated[t]);

  // Uniform fallback for rows where every gated score is zero.
  Tensor fallback(rows, 1);
  for (std::size_t i = 0; i < rows; ++i)
    fallback[i] = total.value()[i] == 0.0 ? 1.0 / static_cast<double>(count) : 0.0;
  Var uniform = tape.constant(std::move(fallback));
  Var denom = ops::floor_at(total, kAttentionFloor);

  Var out;
  for (std::size_t t = 0; t < count; ++t) {
    Var alpha = ops::add(ops::div(gated[t], denom), uniform);
    Var term = ops::mul_col_vector(layers[t], alpha);
    out = t == 0 ? term : ops::add(out, term);
  }
  return out;
}

Var predict_rating(Var user_final, Var item_final, const MlpVars& mlp,
                   double dropout, std::mt19937_64& rng, bool training) {
  if (mlp.weights.empty() || mlp.weights.size() != mlp.biases.size()) {
    throw ContractError("MLP: weights and biases must pair up");
  }
  Var h = ops::concat_cols(user_final, item_final);
  for (std::size_t l = 0; l < mlp.weights.size(); ++l) {
    h = ops::add_row_vector(ops::matmul_nt(h, mlp.weights[l]), mlp.biases[l]);
    if (l + 1 < mlp.weights.size())
      h = ops::dropout(ops::relu(h), dropout, rng, training);
  }
  if (h.cols() != 1) throw ShapeError("MLP: output must be one column, got " + h.value().shape_string());
  return h;
}

std::vector<double> clamp_predictions(const Tensor& raw, double lo, double hi) {
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = std::clamp(raw[i], lo, hi);
  return out;
}

}  // namespace hetgl::predictor
