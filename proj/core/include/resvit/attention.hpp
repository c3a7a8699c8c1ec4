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

// Multi-head self-attention with residual best-head routing.
//
// Each head produces both its probabilistic attention A = softmax(QKᵀ/√d)
// and its output O = A·V. The residual variant scores every head by an L1
// norm of A, picks the highest-scoring head (lowest index on ties) and adds
// that head's output, tiled across the heads' feature slots, to the
// projected multi-head output.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "resvit/autodiff.hpp"
#include "resvit/tensor.hpp"

namespace resvit {

enum class NormPolicy {
  kEntrywiseL1,  ///< sum of |a_ij|; equals n for every row-stochastic n×n matrix
  kInducedL1,    ///< max_j sum_i |a_ij|; measures concentration on key tokens
};

enum class AttentionVariant { kStandard, kResidual };

NormPolicy parse_norm_policy(std::string_view text);
std::string_view to_string(NormPolicy policy);
AttentionVariant parse_attention_variant(std::string_view text);
std::string_view to_string(AttentionVariant variant);

/// Q/K/V/output projections of one attention layer. Weights are [D, D]
/// (applied as x·W), biases [D].
template <typename T>
struct AttentionWeights {
  BasicTensor<T> w_q, b_q, w_k, b_k, w_v, b_v, w_proj, b_proj;

  std::size_t dim() const { return w_q.rows(); }
};

/// Normal(0, stddev) weights and zero biases, deterministic in `seed`.
template <typename T>
AttentionWeights<T> random_attention_weights(std::size_t dim, std::uint64_t seed,
                                             double stddev = 0.3);

/// Dual output of one scaled dot-product head.
template <typename T>
struct HeadAttention {
  BasicTensor<T> probs;   ///< A [n, n], row-stochastic
  BasicTensor<T> output;  ///< O = A·V [n, d]
};

/// Per-head inputs, already projected and sliced: each [n, d_head].
template <typename T>
struct HeadInputs {
  BasicTensor<T> q, k, v;
};

/// Per-call record of every head's attention, its score, and the winner.
template <typename T>
struct BasicAttentionTrace {
  std::vector<BasicTensor<T>> probs;
  std::vector<BasicTensor<T>> outputs;
  std::vector<T> norms;
  std::size_t selected = 0;

  /// Head indices sorted by descending norm, ties by ascending index.
  std::vector<std::size_t> ranking() const;
};

using AttentionTrace = BasicAttentionTrace<double>;

/// Counts the extra reductions the residual variant performs. Used by the
/// benchmark's accounting mode; pass nullptr to skip counting.
struct AttentionOpCounts {
  std::size_t head_attentions = 0;
  std::size_t norm_reductions = 0;
  std::size_t argmax_selections = 0;
  std::size_t tiled_adds = 0;
  std::size_t projections = 0;

  friend bool operator==(const AttentionOpCounts&, const AttentionOpCounts&) = default;
};

template <typename T>
HeadAttention<T> scaled_dot_attention(const BasicTensor<T>& q, const BasicTensor<T>& k,
                                      const BasicTensor<T>& v);

template <typename T>
T head_norm(const BasicTensor<T>& probs, NormPolicy policy);

/// Relative gap below which two head scores are treated as tied.
template <typename T>
constexpr T head_tie_tolerance() {
  return T(4096) * std::numeric_limits<T>::epsilon();
}

/// Index of the largest score; ties (within head_tie_tolerance of the
/// maximum) resolve to the lowest index. Throws UsageError when empty.
template <typename T>
std::size_t select_best_head(std::span<const T> norms);

inline std::size_t select_best_head(const std::vector<double>& norms) {
  return select_best_head(std::span<const double>(norms));
}

/// Tiles a head output [n, d_head] `heads` times along features to [n, D].
template <typename T>
BasicTensor<T> expand_head_output(const BasicTensor<T>& head_output, std::size_t heads);

/// Projects x [n, D] to per-head Q/K/V slices.
template <typename T>
std::vector<HeadInputs<T>> split_heads(const BasicTensor<T>& x, const AttentionWeights<T>& w,
                                       std::size_t heads);

/**
 * Attention over pre-projected heads without the output projection:
 * concat(O_1..O_h), plus expand(O_{i*}) for the residual variant. This is
 * the part whose cost the two variants differ in; the benchmark times it.
 */
template <typename T>
BasicTensor<T> attention_core(std::span<const HeadInputs<T>> heads, AttentionVariant variant,
                              NormPolicy policy, BasicAttentionTrace<T>* trace = nullptr,
                              AttentionOpCounts* counts = nullptr);

/// proj(concat(O_1..O_h)).
template <typename T>
BasicTensor<T> multi_head_attention_standard(const BasicTensor<T>& x,
                                             const AttentionWeights<T>& w, std::size_t heads,
                                             AttentionOpCounts* counts = nullptr);

/// proj(concat(O_1..O_h)) + expand(O_{i*}), with the trace of that choice.
template <typename T>
std::pair<BasicTensor<T>, BasicAttentionTrace<T>> multi_head_attention_residual(
    const BasicTensor<T>& x, const AttentionWeights<T>& w, std::size_t heads, NormPolicy policy,
    AttentionOpCounts* counts = nullptr);

/// Residual attention over a batch; every sequence selects its own head.
std::vector<std::pair<Tensor, AttentionTrace>> multi_head_attention_residual_batch(
    std::span<const Tensor> batch, const AttentionWeights<double>& w, std::size_t heads,
    NormPolicy policy);

namespace ad {

/// Tape-bound attention parameters.
struct AttentionVars {
  Var w_q, b_q, w_k, b_k, w_v, b_v, w_proj, b_proj;
};

struct AttentionOptions {
  AttentionVariant variant = AttentionVariant::kResidual;
  NormPolicy policy = NormPolicy::kInducedL1;
  /// Test hook: compute the selection but add a zero residual term.
  bool zero_residual = false;
};

/**
 * Differentiable multi-head attention on x [n, D].
 *
 * The selected head index is a constant of the backward pass: gradients
 * reach the losing heads only through the projected concatenation, and
 * reach the winner through both paths.
 */
Var multi_head_attention(Var x, const AttentionVars& w, std::size_t heads,
                         const AttentionOptions& options, AttentionTrace* trace = nullptr);

}  // namespace ad
}  // namespace resvit
