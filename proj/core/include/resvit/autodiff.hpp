// Copyright 2026 The ResViT Authors. All Rights Reserved.
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

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "resvit/tensor.hpp"

namespace resvit {

/// A named trainable tensor and its accumulated gradient.
struct Parameter {
  Parameter() = default;
  Parameter(std::string name, Tensor value)
      : name(std::move(name)), value(std::move(value)), grad(this->value.shape()) {}

  std::string name;
  Tensor value;
  Tensor grad;

  void zero_grad() { grad = Tensor(value.shape()); }
};

/// Ordered, name-unique collection of parameters.
class ParameterSet {
 public:
  /// Appends a parameter; throws UsageError if the name already exists.
  std::size_t add(std::string name, Tensor value);

  std::size_t size() const noexcept { return params_.size(); }
  bool empty() const noexcept { return params_.empty(); }

  Parameter& operator[](std::size_t i) { return params_[i]; }
  const Parameter& operator[](std::size_t i) const { return params_[i]; }

  /// Throws UsageError for an unknown name.
  Parameter& find(const std::string& name);
  const Parameter& find(const std::string& name) const;
  bool contains(const std::string& name) const;

  void zero_grad();
  std::size_t element_count() const;

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  friend bool operator==(const ParameterSet& a, const ParameterSet& b);

 private:
  std::vector<Parameter> params_;
};

namespace ad {

class Tape;

/// Handle to a value recorded on a tape.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const Tensor& value() const;
};

/// Maps the upstream gradient of a node's output to one gradient per input
/// (same order and shapes as the inputs).
using BackwardFn = std::function<std::vector<Tensor>(const Tensor& grad_out)>;

/**
 * Define-by-run record of primitive applications.
 *
 * Nodes are appended in evaluation order, so every input id is smaller than
 * its consumer's id and a reverse sweep is a valid topological order. A tape
 * supports exactly one backward pass; afterwards it is closed and any further
 * recording or backward call is a UsageError.
 */
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Leaf with no gradient.
  Var constant(Tensor value);

  /// Leaf bound to `param`; backward() accumulates into `param.grad`.
  /// The parameter must outlive the tape.
  Var parameter(Parameter& param);

  /// Records a derived value. Every input must live on this tape.
  Var record(Tensor value, std::vector<Var> inputs, BackwardFn backward, const char* op);

  const Tensor& value(Var v) const;

  /// Reverse sweep from a scalar `loss`, accumulating into bound parameters.
  void backward(Var loss);

  std::size_t size() const noexcept { return nodes_.size(); }
  bool closed() const noexcept { return closed_; }

  /// Operation name of node `id` (for debugging and tests).
  const char* op_name(std::size_t id) const { return nodes_.at(id).op; }

 private:
  struct Node {
    Tensor value;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    Parameter* param = nullptr;
    const char* op = "";
  };

  void check_open(const char* what) const;
  void check_owned(Var v, const char* what) const;

  std::vector<Node> nodes_;
  bool closed_ = false;
};

}  // namespace ad
}  // namespace resvit
