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

#include "hetgl/engine/optim.hpp"

#include <cmath>

#include "hetgl/engine/ops.hpp"
#include "hetgl/errors.hpp"

namespace hetgl {

Parameter& ParamStore::create(std::string name, Tensor init) {
  if (contains(name)) throw ContractError("duplicate parameter " + name);
  auto p = std::make_unique<Parameter>();
  p->name = std::move(name);
  p->value = std::move(init);
  p->zero_grad();
  params_.push_back(std::move(p));
  return *params_.back();
}

Parameter& ParamStore::get(std::string_view name) {
  for (auto& p : params_)
    if (p->name == name) return *p;
  throw ContractError("unknown parameter " + std::string(name));
}

const Parameter& ParamStore::get(std::string_view name) const {
  for (const auto& p : params_)
    if (p->name == name) return *p;
  throw ContractError("unknown parameter " + std::string(name));
}

bool ParamStore::contains(std::string_view name) const {
  for (const auto& p : params_)
    if (p->name == name) return true;
  return false;
}

void ParamStore::zero_grad() {
  for (auto& p : params_) p->zero_grad();
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p->value.size();
  return n;
}

Tensor gaussian_init(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                     double stddev) {
  std::normal_distribution<double> dist(0.0, stddev);
  Tensor t(rows, cols);
  for (double& v : t.data()) v = dist(rng);
  return t;
}

AdamState::AdamState(const ParamStore& params, AdamConfig cfg) : cfg_(cfg) {
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_.emplace_back(params[i].value.rows(), params[i].value.cols());
    v_.emplace_back(params[i].value.rows(), params[i].value.cols());
  }
}

void AdamState::step(ParamStore& params, double lr) {
  if (!(lr > 0.0)) throw ContractError("adam: learning rate must be positive");
  if (params.size() != m_.size()) {
    throw ContractError("adam: parameter set changed since state creation");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Parameter& p = params[i];
    if (!p.grad.same_shape(p.value) || !m_[i].same_shape(p.value)) {
      throw ShapeError("adam: gradient/moment shape mismatch for " + p.name +
                       ": " + p.grad.shape_string() + " vs " +
                       p.value.shape_string());
    }
    for (double g : p.grad.data()) {
      if (!std::isfinite(g)) {
        throw NumericError("adam: non-finite gradient in parameter " + p.name);
      }
    }
  }
  ++step_;
  const double t = static_cast<double>(step_);
  const double bc1 = 1.0 - std::pow(cfg_.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg_.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = params[i];
    auto m = m_[i].data();
    auto v = v_[i].data();
    auto w = p.value.data();
    auto g = p.grad.data();
    for (std::size_t j = 0; j < w.size(); ++j) {
      m[j] = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * g[j];
      v[j] = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * g[j] * g[j];
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      w[j] -= lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

Var l2_penalty(Tape& tape, const std::vector<Var>& params) {
  Var total = tape.constant(Tensor::scalar(0.0));
  for (const Var& p : params) total = ops::add(total, ops::sum(ops::square(p)));
  return total;
}

double l2_penalty_value(const ParamStore& params) {
  double s = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i)
    for (double v : params[i].value.data()) s += v * v;
  return s;
}

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace hetgl
