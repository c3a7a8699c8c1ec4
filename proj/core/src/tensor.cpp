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

#include "resvit/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace resvit {

std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (auto e : shape) n *= e;
  return n;
}

namespace {

void check_extents(const Shape& shape) {
  for (auto e : shape) {
    if (e == 0) throw DimensionError("tensor extents must be positive, got " + to_string(shape));
  }
}

std::string pair_message(const char* op, const Shape& a, const Shape& b) {
  return std::string(op) + ": incompatible shapes " + to_string(a) + " and " + to_string(b);
}

// Splits a shape around `axis` into (outer, axis extent, inner).
struct AxisView {
  std::size_t outer = 1;
  std::size_t len = 1;
  std::size_t inner = 1;
};

AxisView axis_view(const Shape& shape, std::size_t axis, const char* op) {
  if (axis >= shape.size()) {
    throw DimensionError(std::string(op) + ": axis " + std::to_string(axis) +
                         " out of range for shape " + to_string(shape));
  }
  AxisView v;
  for (std::size_t i = 0; i < axis; ++i) v.outer *= shape[i];
  v.len = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) v.inner *= shape[i];
  return v;
}

template <typename T>
void require_rank2(const BasicTensor<T>& t, const char* op) {
  if (t.rank() != 2) {
    throw DimensionError(std::string(op) + ": expected a rank-2 tensor, got " +
                         to_string(t.shape()));
  }
}

}  // namespace

template <typename T>
BasicTensor<T>::BasicTensor(Shape shape, T fill) : shape_(std::move(shape)) {
  check_extents(shape_);
  data_.assign(shape_size(shape_), fill);
}

template <typename T>
BasicTensor<T>::BasicTensor(Shape shape, std::vector<T> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  check_extents(shape_);
  if (shape_size(shape_) != data_.size()) {
    throw DimensionError("tensor: shape " + to_string(shape_) + " needs " +
                         std::to_string(shape_size(shape_)) + " elements, got " +
                         std::to_string(data_.size()));
  }
}

template <typename T>
BasicTensor<T> BasicTensor<T>::matrix(std::initializer_list<std::initializer_list<T>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.begin()->size() : 0;
  std::vector<T> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionError("matrix literal: ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return BasicTensor(Shape{r, c}, std::move(data));
}

template <typename T>
BasicTensor<T> BasicTensor<T>::vector(std::initializer_list<T> values) {
  return BasicTensor(Shape{values.size()}, std::vector<T>(values));
}

template <typename T>
BasicTensor<T> BasicTensor<T>::vector(std::vector<T> values) {
  const std::size_t n = values.size();
  return BasicTensor(Shape{n}, std::move(values));
}

template <typename T>
BasicTensor<T> BasicTensor<T>::identity(std::size_t n) {
  BasicTensor out(Shape{n, n});
  for (std::size_t i = 0; i < n; ++i) out.at(i, i) = T{1};
  return out;
}

template <typename T>
std::size_t BasicTensor<T>::dim(std::size_t axis) const {
  if (axis >= shape_.size()) {
    throw DimensionError("dim: axis " + std::to_string(axis) + " out of range for shape " +
                         to_string(shape_));
  }
  return shape_[axis];
}

template <typename T>
T BasicTensor<T>::item() const {
  if (data_.size() != 1) {
    throw DimensionError("item: tensor of shape " + to_string(shape_) + " is not a scalar");
  }
  return data_[0];
}

template <typename T>
bool BasicTensor<T>::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](T v) { return std::isfinite(v); });
}

template <typename T>
void ensure_finite(const BasicTensor<T>& t, const char* op) {
  if (!t.all_finite()) throw NumericError(std::string(op) + ": non-finite value produced");
}

template <typename T>
BasicTensor<T> matmul(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  require_rank2(a, "matmul");
  require_rank2(b, "matmul");
  if (a.cols() != b.rows()) throw DimensionError(pair_message("matmul", a.shape(), b.shape()));
  const std::size_t m = a.rows(), k = a.cols(), p = b.cols();
  BasicTensor<T> out(Shape{m, p});
  const T* pa = a.data().data();
  const T* pb = b.data().data();
  T* po = out.data().data();
  // i-k-j order: each output element still accumulates over k ascending.
  for (std::size_t i = 0; i < m; ++i) {
    T* orow = po + i * p;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const T aik = pa[i * k + kk];
      const T* brow = pb + kk * p;
      for (std::size_t j = 0; j < p; ++j) orow[j] += aik * brow[j];
    }
  }
  ensure_finite(out, "matmul");
  return out;
}

template <typename T>
BasicTensor<T> transpose(const BasicTensor<T>& a) {
  require_rank2(a, "transpose");
  const std::size_t r = a.rows(), c = a.cols();
  BasicTensor<T> out(Shape{c, r});
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out.at(j, i) = a.at(i, j);
  return out;
}

template <typename T>
BasicTensor<T> reshape(const BasicTensor<T>& a, Shape shape) {
  if (shape_size(shape) != a.size()) {
    throw DimensionError(pair_message("reshape", a.shape(), shape));
  }
  return BasicTensor<T>(std::move(shape), a.values());
}

namespace {

template <typename T, typename F>
BasicTensor<T> zip(const BasicTensor<T>& a, const BasicTensor<T>& b, const char* op, F f) {
  if (a.shape() != b.shape()) throw DimensionError(pair_message(op, a.shape(), b.shape()));
  BasicTensor<T> out(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i], b[i]);
  ensure_finite(out, op);
  return out;
}

}  // namespace

template <typename T>
BasicTensor<T> add(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  return zip(a, b, "add", [](T x, T y) { return x + y; });
}

template <typename T>
BasicTensor<T> sub(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  return zip(a, b, "sub", [](T x, T y) { return x - y; });
}

template <typename T>
BasicTensor<T> mul(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  return zip(a, b, "mul", [](T x, T y) { return x * y; });
}

template <typename T>
BasicTensor<T> scale(const BasicTensor<T>& a, T factor) {
  BasicTensor<T> out(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * factor;
  ensure_finite(out, "scale");
  return out;
}

template <typename T>
BasicTensor<T> add_bias(const BasicTensor<T>& x, const BasicTensor<T>& bias) {
  if (x.rank() == 0 || bias.rank() != 1 || bias.size() != x.shape().back()) {
    throw DimensionError(pair_message("add_bias", x.shape(), bias.shape()));
  }
  const std::size_t d = bias.size();
  BasicTensor<T> out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + bias[i % d];
  ensure_finite(out, "add_bias");
  return out;
}

template <typename T>
BasicTensor<T> softmax(const BasicTensor<T>& x, std::size_t axis) {
  const AxisView v = axis_view(x.shape(), axis, "softmax");
  if (v.len == 0) throw DimensionError("softmax: empty axis");
  BasicTensor<T> out(x.shape());
  for (std::size_t o = 0; o < v.outer; ++o) {
    for (std::size_t in = 0; in < v.inner; ++in) {
      const std::size_t base = o * v.len * v.inner + in;
      T mx = x[base];
      for (std::size_t i = 1; i < v.len; ++i) mx = std::max(mx, x[base + i * v.inner]);
      T total{0};
      for (std::size_t i = 0; i < v.len; ++i) {
        const T e = std::exp(x[base + i * v.inner] - mx);
        out[base + i * v.inner] = e;
        total += e;
      }
      for (std::size_t i = 0; i < v.len; ++i) out[base + i * v.inner] /= total;
    }
  }
  ensure_finite(out, "softmax");
  return out;
}

template <typename T>
BasicTensor<T> layer_norm(const BasicTensor<T>& x, const BasicTensor<T>& gamma,
                          const BasicTensor<T>& beta, T eps) {
  if (x.rank() == 0) throw DimensionError("layer_norm: scalar input");
  const std::size_t d = x.shape().back();
  if (d == 0) throw DimensionError("layer_norm: D == 0");
  if (gamma.rank() != 1 || gamma.size() != d || beta.rank() != 1 || beta.size() != d) {
    throw DimensionError("layer_norm: affine shapes " + to_string(gamma.shape()) + " and " +
                         to_string(beta.shape()) + " do not match input " +
                         to_string(x.shape()));
  }
  if (!(eps > T{0})) throw DimensionError("layer_norm: eps must be positive");
  BasicTensor<T> out(x.shape());
  const std::size_t rows = x.size() / d;
  for (std::size_t r = 0; r < rows; ++r) {
    const T* row = x.data().data() + r * d;
    T mu{0};
    for (std::size_t j = 0; j < d; ++j) mu += row[j];
    mu /= static_cast<T>(d);
    T var{0};
    for (std::size_t j = 0; j < d; ++j) var += (row[j] - mu) * (row[j] - mu);
    var /= static_cast<T>(d);
    const T inv = T{1} / std::sqrt(var + eps);
    for (std::size_t j = 0; j < d; ++j) {
      out[r * d + j] = (row[j] - mu) * inv * gamma[j] + beta[j];
    }
  }
  ensure_finite(out, "layer_norm");
  return out;
}

template <typename T>
BasicTensor<T> gelu(const BasicTensor<T>& x) {
  const T c = static_cast<T>(std::sqrt(2.0 / std::numbers::pi));
  BasicTensor<T> out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const T v = x[i];
    out[i] = T{0.5} * v * (T{1} + std::tanh(c * (v + T{0.044715} * v * v * v)));
  }
  ensure_finite(out, "gelu");
  return out;
}

template <typename T>
BasicTensor<T> concat(std::span<const BasicTensor<T>> parts, std::size_t axis) {
  if (parts.empty()) throw DimensionError("concat: no inputs");
  const Shape& first = parts.front().shape();
  axis_view(first, axis, "concat");
  Shape out_shape = first;
  out_shape[axis] = 0;
  for (const auto& p : parts) {
    if (p.rank() != first.size()) throw DimensionError(pair_message("concat", first, p.shape()));
    for (std::size_t i = 0; i < first.size(); ++i) {
      if (i != axis && p.shape()[i] != first[i]) {
        throw DimensionError(pair_message("concat", first, p.shape()));
      }
    }
    out_shape[axis] += p.shape()[axis];
  }
  BasicTensor<T> out(out_shape);
  const AxisView ov = axis_view(out_shape, axis, "concat");
  std::size_t offset = 0;
  for (const auto& p : parts) {
    const std::size_t chunk = p.shape()[axis] * ov.inner;
    for (std::size_t o = 0; o < ov.outer; ++o) {
      std::copy_n(p.data().data() + o * chunk, chunk,
                  out.data().data() + o * ov.len * ov.inner + offset);
    }
    offset += chunk;
  }
  return out;
}

template <typename T>
BasicTensor<T> slice(const BasicTensor<T>& x, std::size_t axis, std::size_t begin,
                     std::size_t end) {
  const AxisView v = axis_view(x.shape(), axis, "slice");
  if (begin >= end || end > v.len) {
    throw DimensionError("slice: range [" + std::to_string(begin) + ", " + std::to_string(end) +
                         ") invalid for shape " + to_string(x.shape()) + " axis " +
                         std::to_string(axis));
  }
  Shape out_shape = x.shape();
  out_shape[axis] = end - begin;
  BasicTensor<T> out(out_shape);
  const std::size_t chunk = (end - begin) * v.inner;
  for (std::size_t o = 0; o < v.outer; ++o) {
    std::copy_n(x.data().data() + o * v.len * v.inner + begin * v.inner, chunk,
                out.data().data() + o * chunk);
  }
  return out;
}

template <typename T>
BasicTensor<T> tile(const BasicTensor<T>& x, std::size_t times, std::size_t axis) {
  if (times == 0) throw DimensionError("tile: repeat count must be positive");
  std::vector<BasicTensor<T>> parts(times, x);
  return concat(std::span<const BasicTensor<T>>(parts), axis);
}

template <typename T>
std::vector<std::size_t> argmax(const BasicTensor<T>& x, std::size_t axis) {
  const AxisView v = axis_view(x.shape(), axis, "argmax");
  std::vector<std::size_t> out(v.outer * v.inner, 0);
  for (std::size_t o = 0; o < v.outer; ++o) {
    for (std::size_t in = 0; in < v.inner; ++in) {
      const std::size_t base = o * v.len * v.inner + in;
      std::size_t best = 0;
      for (std::size_t i = 1; i < v.len; ++i) {
        if (x[base + i * v.inner] > x[base + best * v.inner]) best = i;
      }
      out[o * v.inner + in] = best;
    }
  }
  return out;
}

template <typename T>
T sum(const BasicTensor<T>& x) {
  T total{0};
  for (T v : x.data()) total += v;
  return total;
}

template <typename T>
T mean(const BasicTensor<T>& x) {
  return sum(x) / static_cast<T>(x.size());
}

template <typename T>
BasicTensor<T> mean(const BasicTensor<T>& x, std::size_t axis) {
  const AxisView v = axis_view(x.shape(), axis, "mean");
  Shape out_shape = x.shape();
  out_shape.erase(out_shape.begin() + static_cast<std::ptrdiff_t>(axis));
  BasicTensor<T> out(out_shape);
  for (std::size_t o = 0; o < v.outer; ++o) {
    for (std::size_t in = 0; in < v.inner; ++in) {
      T total{0};
      for (std::size_t i = 0; i < v.len; ++i) total += x[o * v.len * v.inner + i * v.inner + in];
      out[o * v.inner + in] = total / static_cast<T>(v.len);
    }
  }
  return out;
}

template <typename T>
T l1_entrywise(const BasicTensor<T>& x) {
  T total{0};
  for (T v : x.data()) total += std::abs(v);
  return total;
}

template <typename T>
T l1_induced(const BasicTensor<T>& x) {
  require_rank2(x, "l1_induced");
  const std::size_t r = x.rows(), c = x.cols();
  std::vector<T> col(c, T{0});
  const T* row = x.data().data();
  for (std::size_t i = 0; i < r; ++i, row += c)
    for (std::size_t j = 0; j < c; ++j) col[j] += std::abs(row[j]);
  return *std::max_element(col.begin(), col.end());
}

template <typename T>
BasicTensor<T> cast(const Tensor& x) {
  std::vector<T> data(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) data[i] = static_cast<T>(x[i]);
  return BasicTensor<T>(x.shape(), std::move(data));
}

#define RESVIT_INSTANTIATE(T)                                                                   \
  template class BasicTensor<T>;                                                                \
  template void ensure_finite<T>(const BasicTensor<T>&, const char*);                           \
  template BasicTensor<T> matmul<T>(const BasicTensor<T>&, const BasicTensor<T>&);              \
  template BasicTensor<T> transpose<T>(const BasicTensor<T>&);                                  \
  template BasicTensor<T> reshape<T>(const BasicTensor<T>&, Shape);                             \
  template BasicTensor<T> add<T>(const BasicTensor<T>&, const BasicTensor<T>&);                 \
  template BasicTensor<T> sub<T>(const BasicTensor<T>&, const BasicTensor<T>&);                 \
  template BasicTensor<T> mul<T>(const BasicTensor<T>&, const BasicTensor<T>&);                 \
  template BasicTensor<T> scale<T>(const BasicTensor<T>&, T);                                   \
  template BasicTensor<T> add_bias<T>(const BasicTensor<T>&, const BasicTensor<T>&);            \
  template BasicTensor<T> softmax<T>(const BasicTensor<T>&, std::size_t);                       \
  template BasicTensor<T> layer_norm<T>(const BasicTensor<T>&, const BasicTensor<T>&,           \
                                        const BasicTensor<T>&, T);                              \
  template BasicTensor<T> gelu<T>(const BasicTensor<T>&);                                       \
  template BasicTensor<T> concat<T>(std::span<const BasicTensor<T>>, std::size_t);              \
  template BasicTensor<T> slice<T>(const BasicTensor<T>&, std::size_t, std::size_t,             \
                                   std::size_t);                                                \
  template BasicTensor<T> tile<T>(const BasicTensor<T>&, std::size_t, std::size_t);             \
  template std::vector<std::size_t> argmax<T>(const BasicTensor<T>&, std::size_t);              \
  template T sum<T>(const BasicTensor<T>&);                                                     \
  template T mean<T>(const BasicTensor<T>&);                                                    \
  template BasicTensor<T> mean<T>(const BasicTensor<T>&, std::size_t);                          \
  template T l1_entrywise<T>(const BasicTensor<T>&);                                            \
  template T l1_induced<T>(const BasicTensor<T>&);                                              \
  template BasicTensor<T> cast<T>(const Tensor&);

RESVIT_INSTANTIATE(double)
RESVIT_INSTANTIATE(float)

#undef RESVIT_INSTANTIATE

}  // namespace resvit
