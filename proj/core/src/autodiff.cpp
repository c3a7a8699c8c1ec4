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

#include "resvit/autodiff.hpp"

#include <optional>

namespace resvit {

std::size_t ParameterSet::add(std::string name, Tensor value) {
  if (contains(name)) throw UsageError("duplicate parameter name: " + name);
  params_.emplace_back(std::move(name), std::move(value));
  return params_.size() - 1;
}

Parameter& ParameterSet::find(const std::string& name) {
  for (auto& p : params_)
    if (p.name == name) return p;
  throw UsageError("unknown parameter: " + name);
}

const Parameter& ParameterSet::find(const std::string& name) const {
  for (const auto& p : params_)
    if (p.name == name) return p;
  throw UsageError("unknown parameter: " + name);
}

bool ParameterSet::contains(const std::string& name) const {
  for (const auto& p : params_)
    if (p.name == name) return true;
  return false;
}

void ParameterSet::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

std::size_t ParameterSet::element_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

bool operator==(const ParameterSet& a, const ParameterSet& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || !(a[i].value == b[i].value)) return false;
  }
  return true;
}

namespace ad {

const Tensor& Var::value() const {
  if (!tape) throw UsageError("value() on a detached variable");
  return tape->value(*this);
}

void Tape::check_open(const char* what) const {
  if (closed_) throw UsageError(std::string(what) + ": tape already consumed by backward()");
}

void Tape::check_owned(Var v, const char* what) const {
  if (v.tape != this || v.id >= nodes_.size()) {
    throw UsageError(std::string(what) + ": variable does not belong to this tape");
  }
}

Var Tape::constant(Tensor value) {
  check_open("constant");
  nodes_.push_back(Node{std::move(value), {}, nullptr, nullptr, "constant"});
  return Var{this, nodes_.size() - 1};
}

Var Tape::parameter(Parameter& param) {
  check_open("parameter");
  if (param.grad.shape() != param.value.shape()) param.zero_grad();
  nodes_.push_back(Node{param.value, {}, nullptr, &param, "parameter"});
  return Var{this, nodes_.size() - 1};
}

Var Tape::record(Tensor value, std::vector<Var> inputs, BackwardFn backward, const char* op) {
  check_open(op);
  std::vector<std::size_t> ids;
  ids.reserve(inputs.size());
  for (Var v : inputs) {
    check_owned(v, op);
    ids.push_back(v.id);
  }
  nodes_.push_back(Node{std::move(value), std::move(ids), std::move(backward), nullptr, op});
  return Var{this, nodes_.size() - 1};
}

const Tensor& Tape::value(Var v) const {
  check_owned(v, "value");
  return nodes_[v.id].value;
}

void Tape::backward(Var loss) {
  check_open("backward");
  check_owned(loss, "backward");
  if (nodes_[loss.id].value.size() != 1) {
    throw UsageError("backward: loss must be a scalar, got shape " +
                     to_string(nodes_[loss.id].value.shape()));
  }
  closed_ = true;

  std::vector<std::optional<Tensor>> grads(loss.id + 1);
  grads[loss.id] = Tensor(nodes_[loss.id].value.shape(), 1.0);

  for (std::size_t id = loss.id + 1; id-- > 0;) {
    if (!grads[id]) continue;
    Node& node = nodes_[id];
    const Tensor& g = *grads[id];
    if (node.param) {
      Tensor& acc = node.param->grad;
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += g[i];
      continue;
    }
    if (!node.backward) continue;
    std::vector<Tensor> in_grads = node.backward(g);
    for (std::size_t k = 0; k < node.inputs.size(); ++k) {
      const std::size_t in = node.inputs[k];
      Tensor& contribution = in_grads[k];
      if (!grads[in]) {
        grads[in] = std::move(contribution);
      } else {
        Tensor& acc = *grads[in];
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += contribution[i];
      }
    }
    grads[id].reset();
  }
}

}  // namespace ad
}  // namespace resvit
