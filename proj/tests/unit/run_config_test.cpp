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


#include "resvit/run_config.hpp"

#include <gtest/gtest.h>

#include <fstream>

#include "test_util.hpp"

namespace resvit {
namespace {

TEST(KeyValueTest, ParsesCommentsAndWhitespace) {
  const KeyValues kv = parse_key_values("# header\n\n  depth = 3 \nvariant=standard\r\n");
  EXPECT_EQ(kv, (KeyValues{{"depth", "3"}, {"variant", "standard"}}));
}

TEST(KeyValueTest, Errors) {
  EXPECT_THROW(parse_key_values("depth 3\n"), ConfigError);
  EXPECT_THROW(parse_key_values("=3\n"), ConfigError);
  EXPECT_THROW(parse_key_values("a=1\na=2\n"), ConfigError);
}

TEST(KeyValueTest, FormatRoundTrip) {
  const KeyValues kv{{"b", "2"}, {"a", "x y"}};
  EXPECT_EQ(format_key_values(kv), "a=x y\nb=2\n");
  EXPECT_EQ(parse_key_values(format_key_values(kv)), kv);
}

TEST(RunConfigTest, DefaultsAndOverrides) {
  const RunConfig rc = RunConfig::from_key_values(
      {{"epochs", "3"}, {"lr", "0.01"}, {"optimizer", "sgd"}, {"heads", "2"},
       {"variant", "standard"}, {"norm", "entrywise"}, {"seed", "12"}, {"data", "/tmp/x"},
       {"dump_attention", "true"}});
  EXPECT_EQ(rc.train.epochs, 3u);
  EXPECT_DOUBLE_EQ(rc.train.learning_rate, 0.01);
  EXPECT_EQ(rc.train.optimizer, OptimizerKind::kSgd);
  EXPECT_EQ(rc.model.heads, 2u);
  EXPECT_EQ(rc.model.variant, AttentionVariant::kStandard);
  EXPECT_EQ(rc.model.norm_policy, NormPolicy::kEntrywiseL1);
  EXPECT_EQ(rc.seed, 12u);
  EXPECT_EQ(rc.model.seed, 12u);
  EXPECT_EQ(rc.train.seed, 12u);
  EXPECT_EQ(rc.data, "/tmp/x");
  EXPECT_TRUE(rc.dump_attention);
  EXPECT_EQ(rc.split_ratio, 0.8);
}

TEST(RunConfigTest, RejectsUnknownAndMalformedValues) {
  EXPECT_THROW(RunConfig::from_key_values({{"epochz", "3"}}), ConfigError);
  EXPECT_THROW(RunConfig::from_key_values({{"epochs", "three"}}), ConfigError);
  EXPECT_THROW(RunConfig::from_key_values({{"lr", "0.1x"}}), ConfigError);
  EXPECT_THROW(RunConfig::from_key_values({{"variant", "weird"}}), ConfigError);
  EXPECT_THROW(RunConfig::from_key_values({{"dump_attention", "maybe"}}), ConfigError);
}

TEST(RunConfigTest, SerializedFormRoundTrips) {
  RunConfig rc = RunConfig::from_key_values({{"lr", "0.1"}, {"seed", "5"}, {"synth_noise", "0.3"}});
  const KeyValues kv = rc.to_key_values();
  const RunConfig back = RunConfig::from_key_values(kv);
  EXPECT_EQ(back.to_key_values(), kv);
  EXPECT_EQ(back.train.learning_rate, 0.1);
  EXPECT_EQ(back.synth_noise, 0.3);
}

TEST(RunConfigTest, Validate) {
  RunConfig rc;
  EXPECT_NO_THROW(rc.validate());
  rc.split_ratio = 1.0;
  EXPECT_THROW(rc.validate(), ConfigError);
  rc = {};
  rc.model.heads = 3;
  EXPECT_THROW(rc.validate(), ConfigError);
  rc = {};
  rc.synth_per_class = 1;
  EXPECT_THROW(rc.validate(), ConfigError);
}

TEST(RunConfigTest, ReadsFile) {
  const auto dir = testing::scratch_dir("run_config");
  std::ofstream(dir / "c.txt") << "epochs = 2\n# comment\n";
  EXPECT_EQ(read_key_value_file(dir / "c.txt"), (KeyValues{{"epochs", "2"}}));
  EXPECT_THROW(read_key_value_file(dir / "missing.txt"), ConfigError);
}

}  // namespace
}  // namespace resvit
