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
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "hetgl/engine/tape.hpp"

namespace hetgl {

// Owns parameters at stable addresses, in creation order.
class ParamStore {
 public:
  Parameter& create(std::string name, Tensor init);
  Parameter& get(std::string_view name);
  const Parameter& get(std::string_view name) const;
  bool contains(std::string_view name) const;

  std::size_t size() const { return params_.size(); }
  Parameter& operator[](std::size_t i) { return *params_[i]; }
  const Parameter& operator[](std::size_t i) const { return *params_[i]; }

  void zero_grad();
  std::size_t scalar_count() const;

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
};

// i.i.d. N(0, stddev²) entries.
Tensor gaussian_init(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                     double stddev = 0.01);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class AdamState {
 public:
  explicit AdamState(const ParamStore& params, AdamConfig cfg = {});

  // One bias-corrected Adam update on every parameter from its .grad.
  // Throws NumericError naming the parameter if any gradient is non-finite;
  // no parameter is modified in that case.
  void step(ParamStore& params, double lr);

  std::int64_t steps() const { return step_; }
  const Tensor& first_moment(std::size_t i) const { return m_[i]; }
  const Tensor& second_moment(std::size_t i) const { return v_[i]; }

 private:
  AdamConfig cfg_;
  std::int64_t step_ = 0;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
};

// Σ over all parameters of squared entries, recorded on `tape` so that it
// contributes 2·θ to each gradient.
Var l2_penalty(Tape& tape, const std::vector<Var>& params);

// Numeric value of the same sum, without a tape.
double l2_penalty_value(const ParamStore& params);

// Independent generator for (seed, stream, index); used for per-epoch
// anchor draws and other substreams that must not perturb the main RNG.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t index);

}  // namespace hetgl
