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

#include "resvit/ops.hpp"

#include <cmath>
#include <numbers>

#include "resvit/train.hpp"

namespace resvit::ad {

namespace {

Tape& same_tape(std::initializer_list<Var> vars, const char* op) {
  Tape* tape = nullptr;
  for (Var v : vars) {
    if (!v.tape) throw UsageError(std::string(op) + ": detached variable");
    if (tape && v.tape != tape) throw UsageError(std::string(op) + ": operands on different tapes");
    tape = v.tape;
  }
  return *tape;
}

}  // namespace

Var add(Var a, Var b) {
  Tape& t = same_tape({a, b}, "add");
  return t.record(resvit::add(a.value(), b.value()), {a, b},
                  [](const Tensor& g) { return std::vector<Tensor>{g, g}; }, "add");
}

Var sub(Var a, Var b) {
  Tape& t = same_tape({a, b}, "sub");
  return t.record(resvit::sub(a.value(), b.value()), {a, b},
                  [](const Tensor& g) { return std::vector<Tensor>{g, resvit::scale(g, -1.0)}; },
                  "sub");
}

Var mul(Var a, Var b) {
  Tape& t = same_tape({a, b}, "mul");
  Tensor av = a.value(), bv = b.value();
  return t.record(resvit::mul(av, bv), {a, b},
                  [av, bv](const Tensor& g) {
                    return std::vector<Tensor>{resvit::mul(g, bv), resvit::mul(g, av)};
                  },
                  "mul");
}

Var scale(Var a, double factor) {
  Tape& t = same_tape({a}, "scale");
  return t.record(resvit::scale(a.value(), factor), {a},
                  [factor](const Tensor& g) { return std::vector<Tensor>{resvit::scale(g, factor)}; },
                  "scale");
}

Var square(Var a) {
  Tape& t = same_tape({a}, "square");
  Tensor av = a.value();
  return t.record(resvit::mul(av, av), {a},
                  [av](const Tensor& g) {
                    return std::vector<Tensor>{resvit::scale(resvit::mul(g, av), 2.0)};
                  },
                  "square");
}

Var matmul(Var a, Var b) {
  Tape& t = same_tape({a, b}, "matmul");
  Tensor av = a.value(), bv = b.value();
  return t.record(resvit::matmul(av, bv), {a, b},
                  [av, bv](const Tensor& g) {
                    return std::vector<Tensor>{resvit::matmul(g, resvit::transpose(bv)),
                                               resvit::matmul(resvit::transpose(av), g)};
                  },
                  "matmul");
}

Var transpose(Var a) {
  Tape& t = same_tape({a}, "transpose");
  return t.record(resvit::transpose(a.value()), {a},
                  [](const Tensor& g) { return std::vector<Tensor>{resvit::transpose(g)}; },
                  "transpose");
}

Var reshape(Var a, Shape shape) {
  Tape& t = same_tape({a}, "reshape");
  Shape original = a.value().shape();
  return t.record(resvit::reshape(a.value(), std::move(shape)), {a},
                  [original](const Tensor& g) {
                    return std::vector<Tensor>{resvit::reshape(g, original)};
                  },
                  "reshape");
}

Var add_bias(Var x, Var bias) {
  Tape& t = same_tape({x, bias}, "add_bias");
  const std::size_t d = bias.value().size();
  return t.record(resvit::add_bias(x.value(), bias.value()), {x, bias},
                  [d](const Tensor& g) {
                    Tensor gb(Shape{d});
                    for (std::size_t i = 0; i < g.size(); ++i) gb[i % d] += g[i];
                    return std::vector<Tensor>{g, std::move(gb)};
                  },
                  "add_bias");
}

Var softmax(Var x, std::size_t axis) {
  Tape& t = same_tape({x}, "softmax");
  Tensor y = resvit::softmax(x.value(), axis);
  return t.record(y, {x},
                  [y, axis](const Tensor& g) {
                    const Shape& s = y.shape();
                    std::size_t outer = 1, inner = 1;
                    for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
                    for (std::size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
                    const std::size_t len = s[axis];
                    Tensor gx(s);
                    for (std::size_t o = 0; o < outer; ++o) {
                      for (std::size_t in = 0; in < inner; ++in) {
                        const std::size_t base = o * len * inner + in;
                        double dot = 0.0;
                        for (std::size_t i = 0; i < len; ++i) {
                          dot += g[base + i * inner] * y[base + i * inner];
                        }
                        for (std::size_t i = 0; i < len; ++i) {
                          const std::size_t k = base + i * inner;
                          gx[k] = y[k] * (g[k] - dot);
                        }
                      }
                    }
                    return std::vector<Tensor>{std::move(gx)};
                  },
                  "softmax");
}

Var layer_norm(Var x, Var gamma, Var beta, double eps) {
  Tape& t = same_tape({x, gamma, beta}, "layer_norm");
  const Tensor& xv = x.value();
  Tensor gv = gamma.value();
  Tensor y = resvit::layer_norm(xv, gv, beta.value(), eps);

  const std::size_t d = gv.size();
  const std::size_t rows = xv.size() / d;
  Tensor xhat(xv.shape());
  std::vector<double> inv(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    double mu = 0.0;
    for (std::size_t j = 0; j < d; ++j) mu += xv[r * d + j];
    mu /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) var += (xv[r * d + j] - mu) * (xv[r * d + j] - mu);
    var /= static_cast<double>(d);
    inv[r] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < d; ++j) xhat[r * d + j] = (xv[r * d + j] - mu) * inv[r];
  }

  return t.record(
      std::move(y), {x, gamma, beta},
      [xhat, inv, gv, d, rows](const Tensor& g) {
        Tensor gx(xhat.shape()), ggamma(Shape{d}), gbeta(Shape{d});
        const double dd = static_cast<double>(d);
        for (std::size_t r = 0; r < rows; ++r) {
          double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
          for (std::size_t j = 0; j < d; ++j) {
            const std::size_t k = r * d + j;
            const double dxhat = g[k] * gv[j];
            sum_dxhat += dxhat;
            sum_dxhat_xhat += dxhat * xhat[k];
            ggamma[j] += g[k] * xhat[k];
            gbeta[j] += g[k];
          }
          for (std::size_t j = 0; j < d; ++j) {
            const std::size_t k = r * d + j;
            const double dxhat = g[k] * gv[j];
            gx[k] = inv[r] / dd * (dd * dxhat - sum_dxhat - xhat[k] * sum_dxhat_xhat);
          }
        }
        return std::vector<Tensor>{std::move(gx), std::move(ggamma), std::move(gbeta)};
      },
      "layer_norm");
}

Var gelu(Var x) {
  Tape& t = same_tape({x}, "gelu");
  Tensor xv = x.value();
  return t.record(resvit::gelu(xv), {x},
                  [xv](const Tensor& g) {
                    const double c = std::sqrt(2.0 / std::numbers::pi);
                    Tensor gx(xv.shape());
                    for (std::size_t i = 0; i < xv.size(); ++i) {
                      const double v = xv[i];
                      const double th = std::tanh(c * (v + 0.044715 * v * v * v));
                      const double du = c * (1.0 + 3.0 * 0.044715 * v * v);
                      gx[i] = g[i] * (0.5 * (1.0 + th) + 0.5 * v * (1.0 - th * th) * du);
                    }
                    return std::vector<Tensor>{std::move(gx)};
                  },
                  "gelu");
}

Var concat(std::span<const Var> parts, std::size_t axis) {
  if (parts.empty()) throw DimensionError("concat: no inputs");
  Tape& t = *parts.front().tape;
  std::vector<Tensor> values;
  std::vector<std::size_t> extents;
  for (Var v : parts) {
    same_tape({parts.front(), v}, "concat");
    values.push_back(v.value());
    extents.push_back(v.value().dim(axis));
  }
  return t.record(resvit::concat(std::span<const Tensor>(values), axis),
                  std::vector<Var>(parts.begin(), parts.end()),
                  [extents, axis](const Tensor& g) {
                    std::vector<Tensor> out;
                    std::size_t offset = 0;
                    for (std::size_t e : extents) {
                      out.push_back(resvit::slice(g, axis, offset, offset + e));
                      offset += e;
                    }
                    return out;
                  },
                  "concat");
}

Var slice(Var x, std::size_t axis, std::size_t begin, std::size_t end) {
  Tape& t = same_tape({x}, "slice");
  Shape shape = x.value().shape();
  return t.record(resvit::slice(x.value(), axis, begin, end), {x},
                  [shape, axis, begin](const Tensor& g) {
                    std::size_t outer = 1, inner = 1;
                    for (std::size_t i = 0; i < axis; ++i) outer *= shape[i];
                    for (std::size_t i = axis + 1; i < shape.size(); ++i) inner *= shape[i];
                    const std::size_t len = shape[axis];
                    const std::size_t glen = g.shape()[axis];
                    Tensor gx(shape);
                    for (std::size_t o = 0; o < outer; ++o)
                      for (std::size_t i = 0; i < glen * inner; ++i)
                        gx[o * len * inner + begin * inner + i] = g[o * glen * inner + i];
                    return std::vector<Tensor>{std::move(gx)};
                  },
                  "slice");
}

Var tile(Var x, std::size_t times, std::size_t axis) {
  Tape& t = same_tape({x}, "tile");
  const std::size_t e = x.value().dim(axis);
  Shape shape = x.value().shape();
  return t.record(resvit::tile(x.value(), times, axis), {x},
                  [shape, e, times, axis](const Tensor& g) {
                    Tensor gx(shape);
                    for (std::size_t k = 0; k < times; ++k) {
                      Tensor part = resvit::slice(g, axis, k * e, (k + 1) * e);
                      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += part[i];
                    }
                    return std::vector<Tensor>{std::move(gx)};
                  },
                  "tile");
}

Var sum(Var x) {
  Tape& t = same_tape({x}, "sum");
  Shape shape = x.value().shape();
  return t.record(Tensor::scalar(resvit::sum(x.value())), {x},
                  [shape](const Tensor& g) { return std::vector<Tensor>{Tensor(shape, g.item())}; },
                  "sum");
}

Var mean(Var x) {
  Tape& t = same_tape({x}, "mean");
  Shape shape = x.value().shape();
  const double n = static_cast<double>(x.value().size());
  return t.record(Tensor::scalar(resvit::mean(x.value())), {x},
                  [shape, n](const Tensor& g) {
                    return std::vector<Tensor>{Tensor(shape, g.item() / n)};
                  },
                  "mean");
}

Var linear(Var x, Var weight, Var bias) { return add_bias(matmul(x, weight), bias); }

Var cross_entropy(Var logits, std::size_t label) {
  Tape& t = same_tape({logits}, "cross_entropy");
  const Tensor& z = logits.value();
  const double loss = resvit::cross_entropy(z, label);
  Tensor p = resvit::softmax(resvit::reshape(z, Shape{z.size()}), 0);
  Shape shape = z.shape();
  return t.record(Tensor::scalar(loss), {logits},
                  [p, shape, label](const Tensor& g) {
                    Tensor gz(shape);
                    for (std::size_t i = 0; i < p.size(); ++i) {
                      gz[i] = g.item() * (p[i] - (i == label ? 1.0 : 0.0));
                    }
                    return std::vector<Tensor>{std::move(gz)};
                  },
                  "cross_entropy");
}

}  // namespace resvit::ad
