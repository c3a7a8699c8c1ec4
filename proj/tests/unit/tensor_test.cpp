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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "test_util.hpp"

namespace resvit {
namespace {

using testing::max_abs_diff;
using testing::random_tensor;

TEST(TensorTest, ShapeInvariant) {
  Tensor t(Shape{2, 3, 4});
  EXPECT_EQ(t.size(), 24u);
  EXPECT_EQ(t.rank(), 3u);
  EXPECT_THROW(Tensor(Shape{2, 0}), DimensionError);
  EXPECT_THROW(Tensor(Shape{2, 2}, std::vector<double>{1, 2, 3}), DimensionError);
  EXPECT_EQ(Tensor::scalar(4.5).item(), 4.5);
  EXPECT_THROW(t.item(), DimensionError);
}

TEST(MatmulTest, IdentityLeavesMatrixUnchanged) {
  std::mt19937_64 rng(1);
  const Tensor b = random_tensor({3, 3}, rng);
  EXPECT_EQ(matmul(Tensor::identity(3), b), b);
}

TEST(MatmulTest, HandComputedProduct) {
  const Tensor a = Tensor::matrix({{1, 2}, {3, 4}});
  const Tensor b = Tensor::matrix({{5, 6}, {7, 8}});
  EXPECT_EQ(matmul(a, b), Tensor::matrix({{19, 22}, {43, 50}}));
}

TEST(MatmulTest, ZeroMatrix) {
  std::mt19937_64 rng(2);
  const Tensor a = random_tensor({4, 3}, rng);
  EXPECT_EQ(matmul(a, Tensor(Shape{3, 5})), Tensor(Shape{4, 5}));
}

TEST(MatmulTest, ShapeMismatchNamesBothShapes) {
  try {
    matmul(Tensor(Shape{2, 3}), Tensor(Shape{2, 3}));
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("[2,3]"), std::string::npos) << msg;
  }
}

TEST(MatmulTest, BitReproducible) {
  std::mt19937_64 rng(3);
  const Tensor a = random_tensor({7, 9}, rng), b = random_tensor({9, 5}, rng);
  EXPECT_EQ(matmul(a, b), matmul(a, b));
}

TEST(MatmulTest, AssociativityProperty) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> dim(1, 6);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = dim(rng), k = dim(rng), p = dim(rng), q = dim(rng);
    const Tensor a = random_tensor({m, k}, rng), b = random_tensor({k, p}, rng),
                 c = random_tensor({p, q}, rng);
    const Tensor left = matmul(matmul(a, b), c), right = matmul(a, matmul(b, c));
    double scale = 0.0;
    for (double v : left.data()) scale = std::max(scale, std::abs(v));
    EXPECT_LE(max_abs_diff(left, right), 1e-9 * std::max(1.0, scale));
  }
}

TEST(SoftmaxTest, UniformOnZeros) {
  const Tensor y = softmax(Tensor::vector({0, 0, 0}), 0);
  for (double v : y.data()) EXPECT_DOUBLE_EQ(v, 1.0 / 3.0);
}

TEST(SoftmaxTest, ShiftInvariance) {
  const Tensor x = Tensor::vector({0.3, -1.2, 2.5, 0.0});
  const Tensor shifted = add(x, Tensor(x.shape(), 17.25));
  EXPECT_LE(max_abs_diff(softmax(x, 0), softmax(shifted, 0)), 1e-15);
}

TEST(SoftmaxTest, ScalarOracle) {
  // exp(i) / sum(exp) evaluated independently.
  const Tensor y = softmax(Tensor::vector({1, 2, 3}), 0);
  EXPECT_NEAR(y[0], 0.09003057, 1e-8);
  EXPECT_NEAR(y[1], 0.24472847, 1e-8);
  EXPECT_NEAR(y[2], 0.66524096, 1e-8);
}

TEST(SoftmaxTest, AxisOutOfRange) {
  EXPECT_THROW(softmax(Tensor(Shape{2, 2}), 2), DimensionError);
}

TEST(SoftmaxTest, ColumnAxis) {
  const Tensor x = Tensor::matrix({{1, 5}, {3, 5}});
  const Tensor y = softmax(x, 0);
  EXPECT_NEAR(y.at(0, 0) + y.at(1, 0), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(y.at(0, 1), 0.5);
}

TEST(SoftmaxTest, RowsStochasticUnderExtremeInputs) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> dim(1, 12);
  std::uniform_real_distribution<double> mag(0.0, 1e4);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t r = dim(rng), c = dim(rng);
    const Tensor x = testing::random_uniform({r, c}, rng, -mag(rng), mag(rng) + 1e-3);
    const Tensor y = softmax(x, 1);
    for (std::size_t i = 0; i < r; ++i) {
      double total = 0.0;
      for (std::size_t j = 0; j < c; ++j) {
        ASSERT_GE(y.at(i, j), 0.0);
        total += y.at(i, j);
      }
      ASSERT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(LayerNormTest, ConstantRowIsZero) {
  const Tensor x = Tensor::matrix({{3, 3, 3, 3}});
  const Tensor y = layer_norm(x, Tensor(Shape{4}, 1.0), Tensor(Shape{4}), 1e-5);
  for (double v : y.data()) EXPECT_EQ(v, 0.0);
}

TEST(LayerNormTest, ZeroGammaYieldsBeta) {
  std::mt19937_64 rng(6);
  const Tensor x = random_tensor({3, 4}, rng);
  const Tensor beta = Tensor::vector({0.5, -1, 2, 0});
  const Tensor y = layer_norm(x, Tensor(Shape{4}), beta, 1e-5);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(y.at(r, j), beta[j]);
}

TEST(LayerNormTest, DirectMeanVarianceOracle) {
  const Tensor y = layer_norm(Tensor::matrix({{1, 2, 3, 4}}), Tensor(Shape{4}, 1.0),
                              Tensor(Shape{4}), 1e-5);
  const double expected[] = {-1.34163, -0.44721, 0.44721, 1.34163};
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(y[j], expected[j], 1e-4);
}

TEST(LayerNormTest, NormalizedMoments) {
  std::mt19937_64 rng(7);
  const Tensor x = random_tensor({5, 16}, rng, 3.0);
  const Tensor y = layer_norm(x, Tensor(Shape{16}, 1.0), Tensor(Shape{16}), 1e-12);
  for (std::size_t r = 0; r < 5; ++r) {
    double mu = 0.0, var = 0.0;
    for (std::size_t j = 0; j < 16; ++j) mu += y.at(r, j);
    mu /= 16;
    for (std::size_t j = 0; j < 16; ++j) var += (y.at(r, j) - mu) * (y.at(r, j) - mu);
    var /= 16;
    EXPECT_LT(std::abs(mu), 1e-10);
    EXPECT_NEAR(var, 1.0, 1e-8);
  }
}

TEST(LayerNormTest, Errors) {
  EXPECT_THROW(Tensor(Shape{0}), DimensionError);  // D == 0 cannot be expressed
  EXPECT_THROW(layer_norm(Tensor(Shape{2, 3}), Tensor(Shape{4}), Tensor(Shape{4}), 1e-5),
               DimensionError);
  EXPECT_THROW(layer_norm(Tensor(Shape{2, 3}), Tensor(Shape{3}), Tensor(Shape{3}), 0.0),
               DimensionError);
}

TEST(GeluTest, KnownValues) {
  EXPECT_EQ(gelu(Tensor::scalar(0.0)).item(), 0.0);
  EXPECT_NEAR(gelu(Tensor::scalar(10.0)).item(), 10.0, 1e-6);
  EXPECT_NEAR(gelu(Tensor::scalar(1.0)).item(), 0.84119, 1e-5);
}

TEST(GeluTest, MonotoneOnGrid) {
  std::vector<double> grid;
  for (int i = 0; i <= 600; ++i) grid.push_back(-3.0 + i * 0.01);
  const Tensor y = gelu(Tensor::vector(grid));
  // The tanh form dips to its minimum near x = -0.75; monotone on either side.
  for (std::size_t i = 1; i < y.size(); ++i) {
    if (grid[i] > -0.74) EXPECT_GT(y[i], y[i - 1]) << grid[i];
  }
}

TEST(ReshapeTransposeTest, InverseRoundTripsAreBitExact) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const Tensor a = random_tensor({3, 8}, rng);
    EXPECT_EQ(reshape(reshape(a, {4, 6}), {3, 8}), a);
    EXPECT_EQ(reshape(reshape(a, {24}), {3, 8}), a);
    EXPECT_EQ(transpose(transpose(a)), a);
  }
  EXPECT_THROW(reshape(Tensor(Shape{2, 3}), {4}), DimensionError);
}

TEST(ShapeOpsTest, ConcatSliceTile) {
  const Tensor a = Tensor::matrix({{1, 2}, {3, 4}});
  const Tensor b = Tensor::matrix({{5}, {6}});
  const Tensor c = concat({a, b}, 1);
  EXPECT_EQ(c, Tensor::matrix({{1, 2, 5}, {3, 4, 6}}));
  EXPECT_EQ(slice(c, 1, 1, 3), Tensor::matrix({{2, 5}, {4, 6}}));
  EXPECT_EQ(slice(c, 0, 1, 2), Tensor::matrix({{3, 4, 6}}));
  EXPECT_EQ(concat({a, a}, 0), Tensor::matrix({{1, 2}, {3, 4}, {1, 2}, {3, 4}}));
  EXPECT_EQ(tile(b, 3, 1), Tensor::matrix({{5, 5, 5}, {6, 6, 6}}));
  EXPECT_THROW(concat({a, Tensor(Shape{3, 1})}, 1), DimensionError);
  EXPECT_THROW(slice(a, 1, 1, 1), DimensionError);
  EXPECT_THROW(slice(a, 1, 0, 3), DimensionError);
}

TEST(ReductionTest, ArgmaxMeanSum) {
  const Tensor x = Tensor::matrix({{1, 7, 7}, {9, 2, 3}});
  EXPECT_EQ(argmax(x, 1), (std::vector<std::size_t>{1, 0}));
  EXPECT_EQ(argmax(x, 0), (std::vector<std::size_t>{1, 0, 0}));
  EXPECT_DOUBLE_EQ(sum(x), 29.0);
  EXPECT_DOUBLE_EQ(mean(x), 29.0 / 6.0);
  EXPECT_EQ(mean(x, 0), Tensor::vector({5, 4.5, 5}));
  EXPECT_EQ(add_bias(x, Tensor::vector({1, 0, -1})), Tensor::matrix({{2, 7, 6}, {10, 2, 2}}));
}

TEST(ReductionTest, L1Norms) {
  const Tensor x = Tensor::matrix({{1, -2}, {-3, 0.5}});
  EXPECT_DOUBLE_EQ(l1_entrywise(x), 6.5);
  EXPECT_DOUBLE_EQ(l1_induced(x), 4.0);
}

TEST(FiniteTest, NonFiniteResultsRaise) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_THROW(add(Tensor::vector({inf}), Tensor::vector({1})), NumericError);
  EXPECT_THROW(scale(Tensor::vector({1e308}), 10.0), NumericError);
}

TEST(FloatTensorTest, SinglePrecisionOps) {
  const TensorF a = TensorF::matrix({{1, 2}, {3, 4}});
  EXPECT_EQ(matmul(a, TensorF::identity(2)), a);
  const TensorF y = softmax(TensorF::vector({1, 2, 3}), 0);
  EXPECT_NEAR(y[2], 0.66524096f, 1e-6f);
}

}  // namespace
}  // namespace resvit
