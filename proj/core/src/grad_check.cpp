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

#include "resvit/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace resvit {

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

namespace {

double evaluate(const LossBuilder& loss, std::uint64_t seed, const std::string& where) {
  ad::Tape tape;
  const double value = loss(tape, seed).value().item();
  if (!std::isfinite(value)) throw NumericError("finite_diff_check: non-finite loss at " + where);
  return value;
}

}  // namespace

GradCheckReport finite_diff_check(const LossBuilder& loss, ParameterSet& params, double eps,
                                  std::uint64_t seed, double denominator_floor) {
  if (!(eps > 0.0)) throw UsageError("finite_diff_check: eps must be positive");

  GradCheckReport report;
  if (params.empty()) return report;

  params.zero_grad();
  {
    ad::Tape tape;
    ad::Var l = loss(tape, seed);
    if (!std::isfinite(l.value().item())) {
      throw NumericError("finite_diff_check: non-finite loss at the unperturbed point");
    }
    tape.backward(l);
  }

  for (Parameter& p : params) {
    GradCheckEntry param_worst{p.name};
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double original = p.value[i];
      const std::string where = p.name + "[" + std::to_string(i) + "]";
      p.value[i] = original + eps;
      const double plus = evaluate(loss, seed, where + " + eps");
      p.value[i] = original - eps;
      const double minus = evaluate(loss, seed, where + " - eps");
      p.value[i] = original;

      GradCheckEntry e{p.name, i, p.grad[i], (plus - minus) / (2.0 * eps)};
      e.rel_error = relative_error(e.analytic, e.numeric, denominator_floor);
      ++report.coordinates;
      if (i == 0 || e.rel_error > param_worst.rel_error) param_worst = e;
      if (report.coordinates == 1 || e.rel_error > report.max_rel_error) {
        report.max_rel_error = e.rel_error;
        report.worst = e;
      }
    }
    report.per_param.push_back(param_worst);
  }
  return report;
}

}  // namespace resvit
