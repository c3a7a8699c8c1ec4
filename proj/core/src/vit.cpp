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

#include "resvit/vit.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <random>

#include "resvit/ops.hpp"

namespace resvit {

void ViTConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("vit config: " + msg); };
  if (image_size == 0 || patch_size == 0 || channels == 0 || embed_dim == 0 || heads == 0 ||
      mlp_dim == 0) {
    fail("image_size, patch_size, channels, embed_dim, heads and mlp_dim must be positive");
  }
  if (image_size % patch_size != 0) {
    fail("image_size " + std::to_string(image_size) + " is not divisible by patch_size " +
         std::to_string(patch_size));
  }
  if (embed_dim % heads != 0) {
    fail("embed_dim " + std::to_string(embed_dim) + " is not divisible by heads " +
         std::to_string(heads));
  }
  if (depth < 1) fail("depth must be at least 1");
  if (num_classes < 2) fail("num_classes must be at least 2");
}

std::map<std::string, std::string> ViTConfig::to_key_values() const {
  return {
      {"image_size", std::to_string(image_size)},
      {"channels", std::to_string(channels)},
      {"patch_size", std::to_string(patch_size)},
      {"embed_dim", std::to_string(embed_dim)},
      {"depth", std::to_string(depth)},
      {"heads", std::to_string(heads)},
      {"mlp_dim", std::to_string(mlp_dim)},
      {"num_classes", std::to_string(num_classes)},
      {"variant", std::string(to_string(variant))},
      {"norm", std::string(to_string(norm_policy))},
      {"seed", std::to_string(seed)},
  };
}

namespace {

template <typename U>
U parse_unsigned(const std::string& key, const std::string& text) {
  U value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" + text +
                      "'");
  }
  return value;
}

}  // namespace

ViTConfig ViTConfig::from_key_values(const std::map<std::string, std::string>& kv) {
  ViTConfig cfg;
  auto size_field = [&](const char* key, std::size_t& field) {
    if (auto it = kv.find(key); it != kv.end()) field = parse_unsigned<std::size_t>(key, it->second);
  };
  size_field("image_size", cfg.image_size);
  size_field("channels", cfg.channels);
  size_field("patch_size", cfg.patch_size);
  size_field("embed_dim", cfg.embed_dim);
  size_field("depth", cfg.depth);
  size_field("heads", cfg.heads);
  size_field("mlp_dim", cfg.mlp_dim);
  size_field("num_classes", cfg.num_classes);
  if (auto it = kv.find("variant"); it != kv.end()) cfg.variant = parse_attention_variant(it->second);
  if (auto it = kv.find("norm"); it != kv.end()) cfg.norm_policy = parse_norm_policy(it->second);
  if (auto it = kv.find("seed"); it != kv.end()) cfg.seed = parse_unsigned<std::uint64_t>("seed", it->second);
  return cfg;
}

std::vector<std::pair<std::string, Shape>> parameter_shapes(const ViTConfig& cfg) {
  cfg.validate();
  const std::size_t d = cfg.embed_dim;
  std::vector<std::pair<std::string, Shape>> out{
      {"patch_embed.weight", {cfg.patch_dim(), d}},
      {"patch_embed.bias", {d}},
      {"cls_token", {1, d}},
      {"pos_embed", {cfg.num_tokens(), d}},
  };
  for (std::size_t b = 0; b < cfg.depth; ++b) {
    const std::string p = "block" + std::to_string(b) + ".";
    out.push_back({p + "ln1.gamma", {d}});
    out.push_back({p + "ln1.beta", {d}});
    for (const char* name : {"q", "k", "v", "proj"}) {
      out.push_back({p + "attn.w_" + name, {d, d}});
      out.push_back({p + "attn.b_" + name, {d}});
    }
    out.push_back({p + "ln2.gamma", {d}});
    out.push_back({p + "ln2.beta", {d}});
    out.push_back({p + "mlp.fc1.weight", {d, cfg.mlp_dim}});
    out.push_back({p + "mlp.fc1.bias", {cfg.mlp_dim}});
    out.push_back({p + "mlp.fc2.weight", {cfg.mlp_dim, d}});
    out.push_back({p + "mlp.fc2.bias", {d}});
  }
  out.push_back({"norm.gamma", {d}});
  out.push_back({"norm.beta", {d}});
  out.push_back({"head.weight", {d, cfg.num_classes}});
  out.push_back({"head.bias", {cfg.num_classes}});
  return out;
}

ModelLayout ModelLayout::resolve(const ParameterSet& params, const ViTConfig& cfg) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < params.size(); ++i) index[params[i].name] = i;
  std::map<std::string, Shape> expected;
  for (auto& [name, shape] : parameter_shapes(cfg)) expected[name] = shape;

  auto at = [&](const std::string& name) {
    auto it = index.find(name);
    if (it == index.end()) throw ConfigError("model state: missing parameter " + name);
    if (params[it->second].value.shape() != expected.at(name)) {
      throw ConfigError("model state: parameter " + name + " has shape " +
                        to_string(params[it->second].value.shape()) + ", expected " +
                        to_string(expected.at(name)));
    }
    return it->second;
  };

  ModelLayout l;
  l.patch_w = at("patch_embed.weight");
  l.patch_b = at("patch_embed.bias");
  l.cls_token = at("cls_token");
  l.pos_embed = at("pos_embed");
  for (std::size_t b = 0; b < cfg.depth; ++b) {
    const std::string p = "block" + std::to_string(b) + ".";
    l.blocks.push_back(BlockLayout{
        at(p + "ln1.gamma"), at(p + "ln1.beta"),
        at(p + "attn.w_q"), at(p + "attn.b_q"), at(p + "attn.w_k"), at(p + "attn.b_k"),
        at(p + "attn.w_v"), at(p + "attn.b_v"), at(p + "attn.w_proj"), at(p + "attn.b_proj"),
        at(p + "ln2.gamma"), at(p + "ln2.beta"),
        at(p + "mlp.fc1.weight"), at(p + "mlp.fc1.bias"),
        at(p + "mlp.fc2.weight"), at(p + "mlp.fc2.bias")});
  }
  l.norm_gamma = at("norm.gamma");
  l.norm_beta = at("norm.beta");
  l.head_w = at("head.weight");
  l.head_b = at("head.bias");
  if (params.size() != expected.size()) {
    throw ConfigError("model state: " + std::to_string(params.size()) + " parameters, expected " +
                      std::to_string(expected.size()));
  }
  return l;
}

ModelState init_params(const ViTConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 0.02);
  auto truncated = [&] {
    for (;;) {
      const double v = normal(rng);
      if (std::abs(v) <= 0.04) return v;
    }
  };
  auto ends_with = [](const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
  };

  ModelState state;
  state.config = cfg;
  state.config.seed = seed;
  for (auto& [name, shape] : parameter_shapes(cfg)) {
    Tensor value(shape);
    if (name == "pos_embed") {
      for (auto& v : value.data()) v = normal(rng);
    } else if (ends_with(name, ".gamma")) {
      value = Tensor(shape, 1.0);
    } else if (shape.size() == 2 && name != "cls_token") {
      for (auto& v : value.data()) v = truncated();
    }
    state.params.add(name, std::move(value));
  }
  state.layout = ModelLayout::resolve(state.params, state.config);
  return state;
}

Tensor extract_patches(const Tensor& image, const ViTConfig& cfg) {
  const Shape expected{cfg.image_size, cfg.image_size, cfg.channels};
  if (image.shape() != expected) {
    throw ConfigError("patch_embed: image shape " + to_string(image.shape()) + ", expected " +
                      to_string(expected));
  }
  if (cfg.patch_size == 0 || cfg.image_size % cfg.patch_size != 0) {
    throw ConfigError("patch_embed: image_size not divisible by patch_size");
  }
  const std::size_t p = cfg.patch_size, c = cfg.channels, side = cfg.patches_per_side();
  const std::size_t w = cfg.image_size;
  Tensor out(Shape{side * side, cfg.patch_dim()});
  for (std::size_t pr = 0; pr < side; ++pr) {
    for (std::size_t pc = 0; pc < side; ++pc) {
      const std::size_t row = pr * side + pc;
      std::size_t col = 0;
      for (std::size_t y = 0; y < p; ++y)
        for (std::size_t x = 0; x < p; ++x)
          for (std::size_t ch = 0; ch < c; ++ch)
            out.at(row, col++) = image[((pr * p + y) * w + (pc * p + x)) * c + ch];
    }
  }
  return out;
}

Tensor patch_embed(const Tensor& image, const Tensor& weight, const Tensor& bias,
                   const ViTConfig& cfg) {
  return add_bias(matmul(extract_patches(image, cfg), weight), bias);
}

namespace {

using Binder = std::function<ad::Var(std::size_t)>;

ForwardResult forward_impl(ad::Tape& tape, const Tensor& image, const ModelState& state,
                           const Binder& bind, const ForwardOptions& options) {
  const ViTConfig& cfg = state.config;
  const ModelLayout& l = state.layout;
  if (l.blocks.size() != cfg.depth) throw ConfigError("forward: layout does not match config");

  ad::Var patches = tape.constant(extract_patches(image, cfg));
  ad::Var tokens = ad::linear(patches, bind(l.patch_w), bind(l.patch_b));
  const ad::Var seq[] = {bind(l.cls_token), tokens};
  ad::Var x = ad::add(ad::concat(seq, 0), bind(l.pos_embed));

  ForwardResult result;
  ad::AttentionOptions attn_opts{cfg.variant, cfg.norm_policy, options.zero_residual};
  for (const BlockLayout& b : l.blocks) {
    ad::Var h = ad::layer_norm(x, bind(b.ln1_gamma), bind(b.ln1_beta), kLayerNormEps);
    const ad::AttentionVars w{bind(b.w_q), bind(b.b_q), bind(b.w_k), bind(b.b_k),
                              bind(b.w_v), bind(b.b_v), bind(b.w_proj), bind(b.b_proj)};
    AttentionTrace trace;
    const bool want_trace = options.keep_traces && cfg.variant == AttentionVariant::kResidual;
    x = ad::add(x, ad::multi_head_attention(h, w, cfg.heads, attn_opts, want_trace ? &trace : nullptr));
    if (want_trace) result.traces.push_back(std::move(trace));

    h = ad::layer_norm(x, bind(b.ln2_gamma), bind(b.ln2_beta), kLayerNormEps);
    h = ad::gelu(ad::linear(h, bind(b.fc1_w), bind(b.fc1_b)));
    x = ad::add(x, ad::linear(h, bind(b.fc2_w), bind(b.fc2_b)));
  }
  ad::Var normed = ad::layer_norm(x, bind(l.norm_gamma), bind(l.norm_beta), kLayerNormEps);
  ad::Var cls = ad::slice(normed, 0, 0, 1);
  ad::Var logits = ad::linear(cls, bind(l.head_w), bind(l.head_b));
  result.logits = ad::reshape(logits, Shape{cfg.num_classes});
  return result;
}

}  // namespace

ForwardResult forward(ad::Tape& tape, const Tensor& image, ModelState& state,
                      const ForwardOptions& options) {
  return forward_impl(
      tape, image, state, [&](std::size_t i) { return tape.parameter(state.params[i]); }, options);
}

ForwardResult forward(ad::Tape& tape, const Tensor& image, const ModelState& state,
                      const ForwardOptions& options) {
  return forward_impl(
      tape, image, state, [&](std::size_t i) { return tape.constant(state.params[i].value); },
      options);
}

Tensor predict_logits(const ModelState& state, const Tensor& image) {
  ad::Tape tape;
  return forward(tape, image, state).logits.value();
}

}  // namespace resvit
