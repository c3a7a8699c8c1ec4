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

#include "resvit/grad_check.hpp"
#include "resvit/vit.hpp"

namespace resvit {

/// image 8, patch 4, 1 channel, D 8, 2 heads, depth 1, mlp 16, 3 classes.
ViTConfig tiny_grad_check_config();

struct ModelGradCheck {
  GradCheckReport report;
  double loss = 0.0;
  /// Smallest gap between the two largest head scores over all blocks at
  /// the unperturbed point (infinity for the standard variant).
  double min_top_gap = 0.0;
  /// False if any perturbed evaluation selected a different head.
  bool selection_stable = true;
};

/**
 * Gradient check of cross-entropy on one random sample: model initialised
 * from `seed`, image uniform in [0, 1) and label uniform, both drawn from
 * `seed` as well.
 */
ModelGradCheck check_model_gradients(const ViTConfig& cfg, std::uint64_t seed, double eps = 1e-5);

}  // namespace resvit
