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

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "resvit/autodiff.hpp"

namespace resvit {

/// Builds a scalar loss on `tape`, binding parameters with tape.parameter().
/// Must be a deterministic function of the parameter values and `seed`.
using LossBuilder = std::function<ad::Var(ad::Tape& tape, std::uint64_t seed)>;

struct GradCheckEntry {
  std::string param;
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
};

struct GradCheckReport {
  std::size_t coordinates = 0;
  double max_rel_error = 0.0;
  /// Coordinate with the largest relative error; meaningless when empty().
  GradCheckEntry worst;
  /// Largest relative error per parameter, in parameter order.
  std::vector<GradCheckEntry> per_param;

  bool empty() const noexcept { return coordinates == 0; }
};

/// Relative error |a - n| / max(|a|, |n|, floor). The floor keeps
/// coordinates whose true gradient is zero from dividing roundoff by zero.
double relative_error(double analytic, double numeric, double floor);

/// Smallest denominator used by relative_error. Central differences of an
/// O(1) loss carry roughly 1e-11 of absolute roundoff at eps = 1e-5, so
/// coordinates whose true gradient is below ~1e-6 (including exactly-zero
/// ones) are judged by absolute error against this floor instead.
inline constexpr double kGradCheckDenominatorFloor = 1e-5;

/**
 * Compares tape gradients of `loss` against central differences
 * (f(θ + eps) - f(θ - eps)) / (2 eps) for every coordinate of every
 * parameter in `params`. Parameter values are restored afterwards and
 * `params` grads hold the analytic gradient on return.
 *
 * Throws NumericError if the loss is non-finite at any perturbed point.
 */
GradCheckReport finite_diff_check(const LossBuilder& loss, ParameterSet& params, double eps,
                                  std::uint64_t seed,
                                  double denominator_floor = kGradCheckDenominatorFloor);

}  // namespace resvit
