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


#include "resvit/model_check.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include "resvit/ops.hpp"

namespace resvit {

ViTConfig tiny_grad_check_config() {
  ViTConfig cfg;
  cfg.image_size = 8;
  cfg.patch_size = 4;
  cfg.channels = 1;
  cfg.embed_dim = 8;
  cfg.heads = 2;
  cfg.depth = 1;
  cfg.mlp_dim = 16;
  cfg.num_classes = 3;
  return cfg;
}

ModelGradCheck check_model_gradients(const ViTConfig& cfg, std::uint64_t seed, double eps) {
  cfg.validate();
  ModelState state = init_params(cfg, seed);

  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> pixel(0.0, 1.0);
  Tensor image(Shape{cfg.image_size, cfg.image_size, cfg.channels});
  for (double& v : image.data()) v = pixel(rng);
  const std::size_t label = std::uniform_int_distribution<std::size_t>(0, cfg.num_classes - 1)(rng);

  ModelGradCheck out;
  std::vector<std::size_t> reference;  // selected head per block at θ
  bool first = true;
  LossBuilder loss = [&](ad::Tape& tape, std::uint64_t) {
    ForwardResult r = forward(tape, image, state, {.keep_traces = true});
    std::vector<std::size_t> selected;
    for (const auto& t : r.traces) selected.push_back(t.selected);
    if (first) {
      reference = selected;
      out.min_top_gap = std::numeric_limits<double>::infinity();
      for (const auto& t : r.traces) {
        auto n = t.norms;
        std::sort(n.rbegin(), n.rend());
        if (n.size() >= 2) out.min_top_gap = std::min(out.min_top_gap, n[0] - n[1]);
      }
      first = false;
    } else if (selected != reference) {
      out.selection_stable = false;
    }
    return ad::cross_entropy(r.logits, label);
  };

  {
    ad::Tape tape;
    out.loss = loss(tape, seed).value().item();
  }
  out.report = finite_diff_check(loss, state.params, eps, seed);
  return out;
}

}  // namespace resvit
