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


#include "resvit/bench.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace resvit {
namespace {

TEST(SlopeFitTest, RecoversPowerLaw) {
  const std::vector<std::size_t> ns{64, 128, 256, 512};
  for (double p : {1.0, 2.0, 2.7}) {
    std::vector<double> t;
    for (auto n : ns) t.push_back(3e-9 * std::pow(static_cast<double>(n), p));
    EXPECT_NEAR(fit_loglog_slope(ns, t), p, 1e-12);
  }
}

TEST(SlopeFitTest, UsesUpperHalfOnly) {
  // A flat low end must not drag the slope down.
  const std::vector<std::size_t> ns{64, 128, 256, 512};
  const std::vector<double> t{1.0, 1.0, 4.0, 16.0};
  EXPECT_NEAR(fit_loglog_slope(ns, t), 2.0, 1e-12);
}

TEST(SlopeFitTest, Errors) {
  const std::vector<std::size_t> one{64};
  const std::vector<double> t{1.0};
  EXPECT_THROW(fit_loglog_slope(one, t), UsageError);
}

TEST(BenchConfigTest, Validation) {
  BenchConfig c;
  EXPECT_NO_THROW(c.validate());
  c.reps = 4;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.ns = {4, 64};
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(BenchGateTest, Thresholds) {
  BenchReport r;
  r.ratios = {1.0, 1.15};
  r.slope_standard = 2.0;
  EXPECT_TRUE(BenchGate{}.passes(r));
  r.ratios.push_back(1.16);
  EXPECT_FALSE(BenchGate{}.passes(r));
  r.ratios.pop_back();
  r.slope_standard = 1.5;
  EXPECT_FALSE(BenchGate{}.passes(r));
}

TEST(BenchTest, SmallRunProducesCsv) {
  BenchConfig c;
  c.ns = {16, 32};
  c.heads = 2;
  c.d_head = 4;
  c.reps = 5;
  const BenchReport r = bench_attention(c);
  EXPECT_TRUE(r.identical_probs);
  ASSERT_EQ(r.results.size(), 4u);
  EXPECT_EQ(r.ratios.size(), 2u);
  for (const auto& res : r.results) EXPECT_GT(res.median_seconds, 0.0);

  std::istringstream csv(to_csv(r));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "variant,n,h,d_head,reps,median_seconds,slope");
  std::size_t rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 6) << line;
  }
  EXPECT_EQ(rows, 4u);
}

TEST(BenchTest, SinglePrecisionRuns) {
  BenchConfig c;
  c.ns = {16, 32};
  c.heads = 2;
  c.d_head = 4;
  c.reps = 5;
  c.single_precision = true;
  EXPECT_TRUE(bench_attention(c).identical_probs);
}

TEST(OpCountTest, ResidualAddsExactlyNormsArgmaxAndOneAdd) {
  for (std::size_t heads : {1, 2, 8}) {
    const auto s = count_attention_ops(16, heads, 4, AttentionVariant::kStandard,
                                       NormPolicy::kInducedL1);
    const auto r = count_attention_ops(16, heads, 4, AttentionVariant::kResidual,
                                       NormPolicy::kInducedL1);
    EXPECT_EQ(s.head_attentions, heads);
    EXPECT_EQ(r.head_attentions, heads);
    EXPECT_EQ(r.projections, s.projections);
    EXPECT_EQ(r.norm_reductions - s.norm_reductions, heads);
    EXPECT_EQ(r.argmax_selections - s.argmax_selections, 1u);
    EXPECT_EQ(r.tiled_adds - s.tiled_adds, 1u);
  }
}

}  // namespace
}  // namespace resvit
