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

// Reverse-mode differentiation over dense tensors.
//
// A Tape owns every value produced while building one loss. Ops append a
// node holding the forward value and, when any input requires a gradient,
// a closure that pushes the output gradient back to the inputs. Because
// nodes are only ever appended, the node order is a topological order.
// backward() walks it in reverse, so a value consumed twice receives the
// sum of both contributions.

#include <cstddef>
#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "hetgl/engine/tensor.hpp"

namespace hetgl {

// A trainable tensor living outside any tape. Gradients from every tape it
// is bound to accumulate into `grad` until zero_grad().
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  void zero_grad() { grad = Tensor(value.rows(), value.cols()); }
};

class Tape;

// Lightweight handle to a node on a tape. Valid while its tape lives.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  const Tensor& value() const;
  // Gradient after backward(); a zero tensor when nothing flowed here.
  Tensor grad() const;
  bool requires_grad() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  std::size_t id() const { return id_; }
  Tape& tape() const { return *tape_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

class Tape {
 public:
  // Receives the node's forward value and its accumulated gradient.
  using BackwardFn =
      std::function<void(Tape&, const Tensor& out, const Tensor& out_grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  // Leaf that collects its own gradient (readable through Var::grad()).
  Var variable(Tensor value);
  // Leaf bound to a parameter; backward() adds its gradient to param.grad.
  Var param(Parameter& p);

  // Appends an op node. `fn` is dropped when no input requires a gradient.
  Var record(Tensor value, std::initializer_list<Var> inputs, BackwardFn fn);
  Var record(Tensor value, const std::vector<Var>& inputs, BackwardFn fn);

  // Propagates d(loss)/d(node) to every node reachable from `loss`.
  // Throws ContractError unless `loss` is 1×1.
  void backward(Var loss);

  // Gradient buffer of node `id`, allocated on first use, or nullptr when
  // the node does not require a gradient.
  Tensor* grad_sink(std::size_t id);

  const Tensor& value(std::size_t id) const { return nodes_[id].value; }
  const Tensor* grad(std::size_t id) const {
    return nodes_[id].grad.empty() ? nullptr : &nodes_[id].grad;
  }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    BackwardFn backward;
    Parameter* param = nullptr;
  };

  std::deque<Node> nodes_;  // stable addresses: value() references survive growth
};

}  // namespace hetgl
