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

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "resvit/error.hpp"

namespace resvit {

using Shape = std::vector<std::size_t>;

std::string to_string(const Shape& shape);
std::size_t shape_size(const Shape& shape);

/**
 * Dense row-major N-dimensional array.
 *
 * Every extent is positive and the element count always equals the product
 * of the extents. A rank-0 tensor holds a single scalar. Tensors are plain
 * values: operations never mutate their inputs and always return a fresh
 * tensor, so a const tensor may be read from any number of threads.
 */
template <typename T>
class BasicTensor {
 public:
  using value_type = T;

  BasicTensor() : shape_{}, data_(1, T{0}) {}

  explicit BasicTensor(Shape shape, T fill = T{0});
  BasicTensor(Shape shape, std::vector<T> data);

  /// 2-D literal, e.g. `Tensor::matrix({{1, 2}, {3, 4}})`.
  static BasicTensor matrix(std::initializer_list<std::initializer_list<T>> rows);
  static BasicTensor vector(std::initializer_list<T> values);
  static BasicTensor vector(std::vector<T> values);
  static BasicTensor scalar(T value) { return BasicTensor(Shape{}, std::vector<T>{value}); }
  static BasicTensor identity(std::size_t n);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t dim(std::size_t axis) const;

  /// Rows/cols of a rank-2 tensor.
  std::size_t rows() const { return dim(0); }
  std::size_t cols() const { return dim(1); }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }
  const std::vector<T>& values() const noexcept { return data_; }

  T& operator[](std::size_t flat) { return data_[flat]; }
  const T& operator[](std::size_t flat) const { return data_[flat]; }

  T& at(std::size_t r, std::size_t c) { return data_[r * shape_[1] + c]; }
  const T& at(std::size_t r, std::size_t c) const { return data_[r * shape_[1] + c]; }

  /// Single element of a rank-0 or one-element tensor.
  T item() const;

  bool all_finite() const noexcept;

  /// Bitwise equality of shape and contents.
  friend bool operator==(const BasicTensor& a, const BasicTensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  Shape shape_;
  std::vector<T> data_;
};

using Tensor = BasicTensor<double>;
using TensorF = BasicTensor<float>;

/// Throws NumericError naming `op` if any element is NaN or infinite.
template <typename T>
void ensure_finite(const BasicTensor<T>& t, const char* op);

// ---------------------------------------------------------------------------
// Primitive operations. All are pure and deterministic: reductions always
// accumulate in ascending index order.

template <typename T>
BasicTensor<T> matmul(const BasicTensor<T>& a, const BasicTensor<T>& b);

template <typename T>
BasicTensor<T> transpose(const BasicTensor<T>& a);

template <typename T>
BasicTensor<T> reshape(const BasicTensor<T>& a, Shape shape);

template <typename T>
BasicTensor<T> add(const BasicTensor<T>& a, const BasicTensor<T>& b);

template <typename T>
BasicTensor<T> sub(const BasicTensor<T>& a, const BasicTensor<T>& b);

/// Elementwise (Hadamard) product.
template <typename T>
BasicTensor<T> mul(const BasicTensor<T>& a, const BasicTensor<T>& b);

template <typename T>
BasicTensor<T> scale(const BasicTensor<T>& a, T factor);

/// Adds `bias[D]` to every row of `x[..., D]`.
template <typename T>
BasicTensor<T> add_bias(const BasicTensor<T>& x, const BasicTensor<T>& bias);

/// Max-shifted softmax along `axis`.
template <typename T>
BasicTensor<T> softmax(const BasicTensor<T>& x, std::size_t axis);

/// Normalizes each row over the last axis, then applies `gamma * x + beta`.
template <typename T>
BasicTensor<T> layer_norm(const BasicTensor<T>& x, const BasicTensor<T>& gamma,
                          const BasicTensor<T>& beta, T eps);

/// tanh approximation: 0.5 x (1 + tanh(sqrt(2/pi) (x + 0.044715 x^3))).
template <typename T>
BasicTensor<T> gelu(const BasicTensor<T>& x);

template <typename T>
BasicTensor<T> concat(std::span<const BasicTensor<T>> parts, std::size_t axis);

template <typename T>
BasicTensor<T> concat(std::initializer_list<BasicTensor<T>> parts, std::size_t axis) {
  return concat(std::span<const BasicTensor<T>>(parts.begin(), parts.size()), axis);
}

/// Half-open range [begin, end) along `axis`.
template <typename T>
BasicTensor<T> slice(const BasicTensor<T>& x, std::size_t axis, std::size_t begin,
                     std::size_t end);

/// Repeats `x` `times` times along `axis`.
template <typename T>
BasicTensor<T> tile(const BasicTensor<T>& x, std::size_t times, std::size_t axis);

/// Index of the maximum along `axis` (first one on ties). The result has the
/// shape of `x` with `axis` removed, flattened.
template <typename T>
std::vector<std::size_t> argmax(const BasicTensor<T>& x, std::size_t axis);

template <typename T>
T sum(const BasicTensor<T>& x);

template <typename T>
T mean(const BasicTensor<T>& x);

/// Mean along `axis`; that axis is removed from the result shape.
template <typename T>
BasicTensor<T> mean(const BasicTensor<T>& x, std::size_t axis);

/// Sum of absolute values of all entries.
template <typename T>
T l1_entrywise(const BasicTensor<T>& x);

/// Maximum absolute column sum of a rank-2 tensor.
template <typename T>
T l1_induced(const BasicTensor<T>& x);

template <typename T>
BasicTensor<T> cast(const Tensor& x);

}  // namespace resvit
