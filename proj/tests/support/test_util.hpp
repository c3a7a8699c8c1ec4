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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "reference_attention.hpp"
#include "resvit/attention.hpp"
#include "resvit/tensor.hpp"

namespace resvit::testing {

inline Tensor random_tensor(Shape shape, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Tensor t(std::move(shape));
  for (auto& v : t.data()) v = normal(rng);
  return t;
}

inline Tensor random_uniform(Shape shape, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor t(std::move(shape));
  for (auto& v : t.data()) v = u(rng);
  return t;
}

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline Mat to_mat(const Tensor& t) {
  Mat m(t.rows(), Vec(t.cols()));
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (std::size_t j = 0; j < t.cols(); ++j) m[i][j] = t.at(i, j);
  return m;
}

inline Vec to_vec(const Tensor& t) { return Vec(t.data().begin(), t.data().end()); }

inline double max_abs_diff(const Tensor& a, const Mat& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a.at(i, j) - b[i][j]));
  return m;
}

inline RefWeights to_ref(const AttentionWeights<double>& w) {
  return RefWeights{to_mat(w.w_q), to_mat(w.w_k), to_mat(w.w_v), to_mat(w.w_proj),
                    to_vec(w.b_q), to_vec(w.b_k), to_vec(w.b_v), to_vec(w.b_proj)};
}

/// Attention weights with random (non-zero) biases.
inline AttentionWeights<double> random_weights(std::size_t dim, std::mt19937_64& rng,
                                               double scale = 0.5) {
  AttentionWeights<double> w;
  w.w_q = random_tensor({dim, dim}, rng, scale);
  w.w_k = random_tensor({dim, dim}, rng, scale);
  w.w_v = random_tensor({dim, dim}, rng, scale);
  w.w_proj = random_tensor({dim, dim}, rng, scale);
  w.b_q = random_tensor({dim}, rng, 0.1);
  w.b_k = random_tensor({dim}, rng, 0.1);
  w.b_v = random_tensor({dim}, rng, 0.1);
  w.b_proj = random_tensor({dim}, rng, 0.1);
  return w;
}

/// Fresh empty directory under the system temp dir, private to this process.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() /
           ("resvit_test_" + std::to_string(::getpid()) + "_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace resvit::testing
