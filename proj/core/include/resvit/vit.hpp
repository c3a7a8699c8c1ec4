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
#include <map>
#include <string>
#include <vector>

#include "resvit/attention.hpp"
#include "resvit/autodiff.hpp"

namespace resvit {

/// Geometry and architecture of a Vision Transformer classifier.
struct ViTConfig {
  std::size_t image_size = 16;
  std::size_t channels = 1;
  std::size_t patch_size = 4;
  std::size_t embed_dim = 16;
  std::size_t depth = 2;
  std::size_t heads = 4;
  std::size_t mlp_dim = 32;
  std::size_t num_classes = 4;
  AttentionVariant variant = AttentionVariant::kResidual;
  NormPolicy norm_policy = NormPolicy::kInducedL1;
  std::uint64_t seed = 0;

  /// Throws ConfigError on any broken invariant.
  void validate() const;

  std::size_t patches_per_side() const { return image_size / patch_size; }
  std::size_t num_patches() const { return patches_per_side() * patches_per_side(); }
  /// Patch tokens plus the class token.
  std::size_t num_tokens() const { return num_patches() + 1; }
  std::size_t patch_dim() const { return patch_size * patch_size * channels; }
  std::size_t head_dim() const { return embed_dim / heads; }

  std::map<std::string, std::string> to_key_values() const;
  /// Reads the keys written by to_key_values(); unknown keys are ignored,
  /// missing keys keep their defaults.
  static ViTConfig from_key_values(const std::map<std::string, std::string>& kv);

  friend bool operator==(const ViTConfig&, const ViTConfig&) = default;
};

inline constexpr double kLayerNormEps = 1e-6;

/// Parameter indices of one encoder block.
struct BlockLayout {
  std::size_t ln1_gamma, ln1_beta;
  std::size_t w_q, b_q, w_k, b_k, w_v, b_v, w_proj, b_proj;
  std::size_t ln2_gamma, ln2_beta;
  std::size_t fc1_w, fc1_b, fc2_w, fc2_b;
};

struct ModelLayout {
  std::size_t patch_w, patch_b, cls_token, pos_embed;
  std::vector<BlockLayout> blocks;
  std::size_t norm_gamma, norm_beta, head_w, head_b;

  /// Resolves indices by parameter name; throws ConfigError if a name is
  /// missing or has the wrong shape for `cfg`.
  static ModelLayout resolve(const ParameterSet& params, const ViTConfig& cfg);
};

/// All trainable state of a model plus the configuration it was built for.
struct ModelState {
  ViTConfig config;
  ParameterSet params;
  ModelLayout layout;

  friend bool operator==(const ModelState& a, const ModelState& b) {
    return a.config == b.config && a.params == b.params;
  }
};

/// Parameter names and shapes `cfg` requires, in registration order.
std::vector<std::pair<std::string, Shape>> parameter_shapes(const ViTConfig& cfg);

/**
 * Fresh model: linear weights truncated-normal(0, 0.02) cut at two standard
 * deviations, biases zero, layer-norm gamma one and beta zero, positional
 * embedding normal(0, 0.02), class token zero. Bit-identical for equal seeds.
 */
ModelState init_params(const ViTConfig& cfg, std::uint64_t seed);

/// Splits image [H, W, C] into row-major P×P×C patches, scanned
/// left-to-right then top-to-bottom: result [(H/P)², P·P·C].
Tensor extract_patches(const Tensor& image, const ViTConfig& cfg);

/// extract_patches(image) · weight + bias.
Tensor patch_embed(const Tensor& image, const Tensor& weight, const Tensor& bias,
                   const ViTConfig& cfg);

struct ForwardOptions {
  /// Record one AttentionTrace per block (residual variant only).
  bool keep_traces = false;
  /// Test hook: keep head selection but add a zero residual term.
  bool zero_residual = false;
};

struct ForwardResult {
  ad::Var logits;  ///< [num_classes], pre-softmax
  std::vector<AttentionTrace> traces;
};

/// Forward pass on `tape` with parameters bound for training: backward()
/// on a loss derived from the logits accumulates into `state.params`.
ForwardResult forward(ad::Tape& tape, const Tensor& image, ModelState& state,
                      const ForwardOptions& options = {});

/// Inference forward pass; parameters enter the tape as constants.
ForwardResult forward(ad::Tape& tape, const Tensor& image, const ModelState& state,
                      const ForwardOptions& options = {});

/// Convenience inference returning logits only.
Tensor predict_logits(const ModelState& state, const Tensor& image);

}  // namespace resvit
