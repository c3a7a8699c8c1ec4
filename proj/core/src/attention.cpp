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

#include "resvit/attention.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "resvit/ops.hpp"

namespace resvit {

NormPolicy parse_norm_policy(std::string_view text) {
  if (text == "induced" || text == "induced-l1") return NormPolicy::kInducedL1;
  if (text == "entrywise" || text == "entrywise-l1") return NormPolicy::kEntrywiseL1;
  throw ConfigError("unknown norm policy '" + std::string(text) +
                    "' (expected entrywise or induced)");
}

std::string_view to_string(NormPolicy policy) {
  return policy == NormPolicy::kInducedL1 ? "induced" : "entrywise";
}

AttentionVariant parse_attention_variant(std::string_view text) {
  if (text == "residual") return AttentionVariant::kResidual;
  if (text == "standard") return AttentionVariant::kStandard;
  throw ConfigError("unknown attention variant '" + std::string(text) +
                    "' (expected standard or residual)");
}

std::string_view to_string(AttentionVariant variant) {
  return variant == AttentionVariant::kResidual ? "residual" : "standard";
}

template <typename T>
AttentionWeights<T> random_attention_weights(std::size_t dim, std::uint64_t seed,
                                             double stddev) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, stddev);
  auto matrix = [&] {
    BasicTensor<T> m(Shape{dim, dim});
    for (auto& v : m.data()) v = static_cast<T>(normal(rng));
    return m;
  };
  AttentionWeights<T> w;
  w.w_q = matrix();
  w.w_k = matrix();
  w.w_v = matrix();
  w.w_proj = matrix();
  w.b_q = w.b_k = w.b_v = w.b_proj = BasicTensor<T>(Shape{dim});
  return w;
}

template <typename T>
std::vector<std::size_t> BasicAttentionTrace<T>::ranking() const {
  std::vector<std::size_t> order(norms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [this](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });
  return order;
}

template <typename T>
HeadAttention<T> scaled_dot_attention(const BasicTensor<T>& q, const BasicTensor<T>& k,
                                      const BasicTensor<T>& v) {
  if (q.rank() != 2 || k.shape() != q.shape() || v.shape() != q.shape()) {
    throw DimensionError("scaled_dot_attention: Q " + to_string(q.shape()) + ", K " +
                         to_string(k.shape()) + ", V " + to_string(v.shape()) +
                         " must share one [n, d] shape");
  }
  const T inv_sqrt_d = T{1} / std::sqrt(static_cast<T>(q.cols()));
  HeadAttention<T> out;
  out.probs = softmax(scale(matmul(q, transpose(k)), inv_sqrt_d), 1);
  out.output = matmul(out.probs, v);
  return out;
}

template <typename T>
T head_norm(const BasicTensor<T>& probs, NormPolicy policy) {
  return policy == NormPolicy::kInducedL1 ? l1_induced(probs) : l1_entrywise(probs);
}

template <typename T>
std::size_t select_best_head(std::span<const T> norms) {
  if (norms.empty()) throw UsageError("select_best_head: no heads");
  const T top = *std::max_element(norms.begin(), norms.end());
  // Scores within rounding distance of the maximum count as tied, so that
  // mathematically equal norms (e.g. every entrywise norm is n) pick head 0.
  const T tol = head_tie_tolerance<T>() * std::abs(top);
  for (std::size_t i = 0; i < norms.size(); ++i) {
    if (norms[i] >= top - tol) return i;
  }
  return 0;
}

template <typename T>
BasicTensor<T> expand_head_output(const BasicTensor<T>& head_output, std::size_t heads) {
  return tile(head_output, heads, 1);
}

namespace {

void check_heads(std::size_t dim, std::size_t heads) {
  if (heads == 0 || dim % heads != 0) {
    throw ConfigError("attention: embedding dim " + std::to_string(dim) +
                      " is not divisible by head count " + std::to_string(heads));
  }
}

template <typename T>
void check_weights(const BasicTensor<T>& x, const AttentionWeights<T>& w) {
  const std::size_t d = x.cols();
  const Shape square{d, d}, vec{d};
  if (w.w_q.shape() != square || w.w_k.shape() != square || w.w_v.shape() != square ||
      w.w_proj.shape() != square || w.b_q.shape() != vec || w.b_k.shape() != vec ||
      w.b_v.shape() != vec || w.b_proj.shape() != vec) {
    throw DimensionError("attention: weights do not match input " + to_string(x.shape()));
  }
}

template <typename T>
std::vector<HeadAttention<T>> run_heads(std::span<const HeadInputs<T>> heads,
                                        AttentionOpCounts* counts) {
  std::vector<HeadAttention<T>> out;
  out.reserve(heads.size());
  for (const auto& h : heads) out.push_back(scaled_dot_attention(h.q, h.k, h.v));
  if (counts) counts->head_attentions += heads.size();
  return out;
}

template <typename T>
BasicTensor<T> concat_outputs(const std::vector<HeadAttention<T>>& heads) {
  std::vector<BasicTensor<T>> outputs;
  outputs.reserve(heads.size());
  for (const auto& h : heads) outputs.push_back(h.output);
  return concat(std::span<const BasicTensor<T>>(outputs), 1);
}

template <typename T>
std::size_t score_and_select(const std::vector<HeadAttention<T>>& heads, NormPolicy policy,
                             std::vector<T>& norms, AttentionOpCounts* counts) {
  norms.clear();
  for (const auto& h : heads) norms.push_back(head_norm(h.probs, policy));
  const std::size_t best = select_best_head(std::span<const T>(norms));
  if (counts) {
    counts->norm_reductions += heads.size();
    counts->argmax_selections += 1;
  }
  return best;
}

template <typename T>
void fill_trace(BasicAttentionTrace<T>* trace, std::vector<HeadAttention<T>>&& heads,
                std::vector<T>&& norms, std::size_t selected) {
  if (!trace) return;
  trace->probs.clear();
  trace->outputs.clear();
  for (auto& h : heads) {
    trace->probs.push_back(std::move(h.probs));
    trace->outputs.push_back(std::move(h.output));
  }
  trace->norms = std::move(norms);
  trace->selected = selected;
}

}  // namespace

template <typename T>
std::vector<HeadInputs<T>> split_heads(const BasicTensor<T>& x, const AttentionWeights<T>& w,
                                       std::size_t heads) {
  if (x.rank() != 2) throw DimensionError("attention: input must be [n, D], got " + to_string(x.shape()));
  check_heads(x.cols(), heads);
  check_weights(x, w);
  const BasicTensor<T> q = add_bias(matmul(x, w.w_q), w.b_q);
  const BasicTensor<T> k = add_bias(matmul(x, w.w_k), w.b_k);
  const BasicTensor<T> v = add_bias(matmul(x, w.w_v), w.b_v);
  const std::size_t dh = x.cols() / heads;
  std::vector<HeadInputs<T>> out;
  out.reserve(heads);
  for (std::size_t i = 0; i < heads; ++i) {
    out.push_back({slice(q, 1, i * dh, (i + 1) * dh), slice(k, 1, i * dh, (i + 1) * dh),
                   slice(v, 1, i * dh, (i + 1) * dh)});
  }
  return out;
}

template <typename T>
BasicTensor<T> attention_core(std::span<const HeadInputs<T>> heads, AttentionVariant variant,
                              NormPolicy policy, BasicAttentionTrace<T>* trace,
                              AttentionOpCounts* counts) {
  if (heads.empty()) throw UsageError("attention_core: no heads");
  auto results = run_heads(heads, counts);
  BasicTensor<T> out = concat_outputs(results);
  std::vector<T> norms;
  std::size_t best = 0;
  if (variant == AttentionVariant::kResidual) {
    best = score_and_select(results, policy, norms, counts);
    // Same sums as add(out, expand_head_output(...)) without the tiled temporary.
    const BasicTensor<T>& o = results[best].output;
    const std::size_t n = out.rows(), dh = o.cols();
    T* dst = out.data().data();
    const T* src = o.data().data();
    for (std::size_t i = 0; i < n; ++i, src += dh)
      for (std::size_t h = 0; h < heads.size(); ++h, dst += dh)
        for (std::size_t c = 0; c < dh; ++c) dst[c] += src[c];
    if (counts) counts->tiled_adds += 1;
  }
  fill_trace(trace, std::move(results), std::move(norms), best);
  return out;
}

template <typename T>
BasicTensor<T> multi_head_attention_standard(const BasicTensor<T>& x,
                                             const AttentionWeights<T>& w, std::size_t heads,
                                             AttentionOpCounts* counts) {
  const auto inputs = split_heads(x, w, heads);
  const auto results = run_heads(std::span<const HeadInputs<T>>(inputs), counts);
  if (counts) counts->projections += 4;
  return add_bias(matmul(concat_outputs(results), w.w_proj), w.b_proj);
}

template <typename T>
std::pair<BasicTensor<T>, BasicAttentionTrace<T>> multi_head_attention_residual(
    const BasicTensor<T>& x, const AttentionWeights<T>& w, std::size_t heads, NormPolicy policy,
    AttentionOpCounts* counts) {
  const auto inputs = split_heads(x, w, heads);
  auto results = run_heads(std::span<const HeadInputs<T>>(inputs), counts);
  if (counts) counts->projections += 4;
  BasicTensor<T> projected = add_bias(matmul(concat_outputs(results), w.w_proj), w.b_proj);
  std::vector<T> norms;
  const std::size_t best = score_and_select(results, policy, norms, counts);
  BasicTensor<T> out = add(projected, expand_head_output(results[best].output, heads));
  if (counts) counts->tiled_adds += 1;
  BasicAttentionTrace<T> trace;
  fill_trace(&trace, std::move(results), std::move(norms), best);
  return {std::move(out), std::move(trace)};
}

std::vector<std::pair<Tensor, AttentionTrace>> multi_head_attention_residual_batch(
    std::span<const Tensor> batch, const AttentionWeights<double>& w, std::size_t heads,
    NormPolicy policy) {
  std::vector<std::pair<Tensor, AttentionTrace>> out;
  out.reserve(batch.size());
  for (const Tensor& x : batch) out.push_back(multi_head_attention_residual(x, w, heads, policy));
  return out;
}

#define RESVIT_INSTANTIATE(T)                                                                  \
  template struct BasicAttentionTrace<T>;                                                      \
  template AttentionWeights<T> random_attention_weights<T>(std::size_t, std::uint64_t, double); \
  template HeadAttention<T> scaled_dot_attention<T>(const BasicTensor<T>&, const BasicTensor<T>&, \
                                                    const BasicTensor<T>&);                    \
  template T head_norm<T>(const BasicTensor<T>&, NormPolicy);                                  \
  template std::size_t select_best_head<T>(std::span<const T>);                                \
  template BasicTensor<T> expand_head_output<T>(const BasicTensor<T>&, std::size_t);           \
  template std::vector<HeadInputs<T>> split_heads<T>(const BasicTensor<T>&,                    \
                                                     const AttentionWeights<T>&, std::size_t); \
  template BasicTensor<T> attention_core<T>(std::span<const HeadInputs<T>>, AttentionVariant,  \
                                            NormPolicy, BasicAttentionTrace<T>*,               \
                                            AttentionOpCounts*);                               \
  template BasicTensor<T> multi_head_attention_standard<T>(                                    \
      const BasicTensor<T>&, const AttentionWeights<T>&, std::size_t, AttentionOpCounts*);     \
  template std::pair<BasicTensor<T>, BasicAttentionTrace<T>> multi_head_attention_residual<T>( \
      const BasicTensor<T>&, const AttentionWeights<T>&, std::size_t, NormPolicy,              \
      AttentionOpCounts*);

RESVIT_INSTANTIATE(double)
RESVIT_INSTANTIATE(float)

#undef RESVIT_INSTANTIATE

namespace ad {

Var multi_head_attention(Var x, const AttentionVars& w, std::size_t heads,
                         const AttentionOptions& options, AttentionTrace* trace) {
  const Tensor& xv = x.value();
  if (xv.rank() != 2) throw DimensionError("attention: input must be [n, D], got " + to_string(xv.shape()));
  check_heads(xv.cols(), heads);
  const std::size_t dh = xv.cols() / heads;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(dh));

  Var q = linear(x, w.w_q, w.b_q);
  Var k = linear(x, w.w_k, w.b_k);
  Var v = linear(x, w.w_v, w.b_v);

  std::vector<Var> outputs;
  std::vector<Var> probs;
  outputs.reserve(heads);
  probs.reserve(heads);
  for (std::size_t i = 0; i < heads; ++i) {
    Var qi = slice(q, 1, i * dh, (i + 1) * dh);
    Var ki = slice(k, 1, i * dh, (i + 1) * dh);
    Var vi = slice(v, 1, i * dh, (i + 1) * dh);
    Var a = softmax(scale(matmul(qi, transpose(ki)), inv_sqrt_d), 1);
    probs.push_back(a);
    outputs.push_back(matmul(a, vi));
  }
  Var out = linear(concat(std::span<const Var>(outputs), 1), w.w_proj, w.b_proj);

  std::vector<double> norms;
  std::size_t best = 0;
  if (options.variant == AttentionVariant::kResidual) {
    for (Var a : probs) norms.push_back(head_norm(a.value(), options.policy));
    best = select_best_head(std::span<const double>(norms));
    Var residual = tile(outputs[best], heads, 1);
    if (options.zero_residual) residual = scale(residual, 0.0);
    out = add(out, residual);
  }

  if (trace) {
    trace->probs.clear();
    trace->outputs.clear();
    for (std::size_t i = 0; i < heads; ++i) {
      trace->probs.push_back(probs[i].value());
      trace->outputs.push_back(outputs[i].value());
    }
    trace->norms = std::move(norms);
    trace->selected = best;
  }
  return out;
}

}  // namespace ad
}  // namespace resvit
