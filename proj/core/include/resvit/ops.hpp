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

// Differentiable counterparts of the tensor primitives. Each function
// computes its value with the plain tensor operation and records the
// matching backward rule on the operands' tape.

#include <span>
#include <vector>

#include "resvit/autodiff.hpp"

namespace resvit::ad {

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);
Var square(Var a);
Var matmul(Var a, Var b);
Var transpose(Var a);
Var reshape(Var a, Shape shape);
Var add_bias(Var x, Var bias);
Var softmax(Var x, std::size_t axis);
Var layer_norm(Var x, Var gamma, Var beta, double eps);
Var gelu(Var x);
Var concat(std::span<const Var> parts, std::size_t axis);
Var slice(Var x, std::size_t axis, std::size_t begin, std::size_t end);
Var tile(Var x, std::size_t times, std::size_t axis);
Var sum(Var x);
Var mean(Var x);

/// x · W + b with W[in, out] and b[out].
Var linear(Var x, Var weight, Var bias);

/// -log softmax(logits)[label] in log-sum-exp form. `logits` must hold
/// exactly `num_classes` elements.
Var cross_entropy(Var logits, std::size_t label);

}  // namespace resvit::ad
