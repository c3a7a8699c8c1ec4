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

#include "resvit/data.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <set>

#include "test_util.hpp"

namespace resvit {
namespace {

namespace fs = std::filesystem;

std::string ppm(std::size_t w, std::size_t h, const std::vector<std::uint8_t>& rgb) {
  std::string s = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  s.append(rgb.begin(), rgb.end());
  return s;
}

void write_file(const fs::path& p, const std::string& bytes) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << bytes;
}

RgbImage solid(std::size_t w, std::size_t h, std::uint8_t v) {
  return {w, h, std::vector<std::uint8_t>(w * h * 3, v)};
}

TEST(PpmTest, SingleWhitePixelIsOne) {
  const RgbImage img = decode_ppm(ppm(1, 1, {255, 255, 255}));
  const Tensor t = image_to_tensor(img, 1, 3);
  EXPECT_EQ(t.shape(), (Shape{1, 1, 3}));
  for (double v : t.data()) EXPECT_EQ(v, 1.0);
  EXPECT_EQ(image_to_tensor(img, 1, 1)[0], 1.0);
}

TEST(PpmTest, TwoByTwoByteOracle) {
  const std::vector<std::uint8_t> bytes{0, 51, 102, 153, 204, 255, 10, 20, 30, 255, 0, 128};
  const Tensor t = image_to_tensor(decode_ppm(ppm(2, 2, bytes)), 2, 3);
  ASSERT_EQ(t.shape(), (Shape{2, 2, 3}));
  for (std::size_t i = 0; i < bytes.size(); ++i) EXPECT_EQ(t[i], bytes[i] / 255.0) << i;
  // Grey conversion averages the three channels.
  const Tensor g = image_to_tensor(decode_ppm(ppm(2, 2, bytes)), 2, 1);
  EXPECT_EQ(g[0], (0 + 51 + 102) / (3.0 * 255.0));
  EXPECT_EQ(g[3], (255 + 0 + 128) / (3.0 * 255.0));
}

TEST(PpmTest, HeaderCommentsAndWhitespace) {
  std::string s = "P6 # a comment\n# another\n 2\t1 \n255\n";
  s.append({char(1), char(2), char(3), char(4), char(5), char(6)});
  const RgbImage img = decode_ppm(s);
  EXPECT_EQ(img.width, 2u);
  EXPECT_EQ(img.height, 1u);
  EXPECT_EQ(img.pixels, (std::vector<std::uint8_t>{1, 2, 3, 4, 5, 6}));
}

TEST(PpmTest, RasterMayStartWithWhitespaceByte) {
  // Exactly one whitespace byte separates maxval from the raster; a raster
  // starting with byte 10 ('\n') must not be swallowed.
  const RgbImage img = decode_ppm(ppm(1, 1, {10, 32, 9}));
  EXPECT_EQ(img.pixels, (std::vector<std::uint8_t>{10, 32, 9}));
}

TEST(PpmTest, EncodeDecodeRoundTrip) {
  std::mt19937_64 rng(1);
  RgbImage img{3, 5, {}};
  for (int i = 0; i < 45; ++i) img.pixels.push_back(static_cast<std::uint8_t>(rng()));
  const RgbImage back = decode_ppm(encode_ppm(img));
  EXPECT_EQ(back.width, 3u);
  EXPECT_EQ(back.height, 5u);
  EXPECT_EQ(back.pixels, img.pixels);
}

TEST(PpmTest, MalformedInputs) {
  EXPECT_THROW(decode_ppm(""), IoError);
  EXPECT_THROW(decode_ppm("P3\n1 1\n255\n   "), IoError);
  EXPECT_THROW(decode_ppm("P6\n1 1\n255\nab"), IoError);  // truncated
  EXPECT_THROW(decode_ppm("P6\n0 1\n255\n"), IoError);
  EXPECT_THROW(decode_ppm("P6\n1 1\n65535\nabcdef"), IoError);
  EXPECT_THROW(decode_ppm("P6\n1 x\n255\nabc"), IoError);
}

TEST(PngTest, RoundTrip) {
  const auto dir = testing::scratch_dir("png");
  RgbImage img{4, 3, {}};
  for (std::size_t i = 0; i < 36; ++i) img.pixels.push_back(static_cast<std::uint8_t>(i * 7));
  write_png(dir / "a.png", img);
  const RgbImage back = read_png(dir / "a.png");
  EXPECT_EQ(back.width, 4u);
  EXPECT_EQ(back.height, 3u);
  EXPECT_EQ(back.pixels, img.pixels);
  EXPECT_EQ(read_image(dir / "a.png").pixels, img.pixels);
}

TEST(PngTest, GarbageIsIoError) {
  const auto dir = testing::scratch_dir("png_bad");
  write_file(dir / "bad.png", "definitely not a png");
  EXPECT_THROW(read_png(dir / "bad.png"), IoError);
}

TEST(ResizeTest, NearestNeighbour) {
  // 2×1 image (black, white) upsampled to 4×4: left half black, right white.
  RgbImage img{2, 1, {0, 0, 0, 255, 255, 255}};
  const Tensor t = image_to_tensor(img, 4, 1);
  for (std::size_t y = 0; y < 4; ++y)
    for (std::size_t x = 0; x < 4; ++x) EXPECT_EQ(t[y * 4 + x], x < 2 ? 0.0 : 1.0);
  const Tensor down = image_to_tensor(solid(9, 9, 51), 3, 3);
  for (double v : down.data()) EXPECT_EQ(v, 0.2);
}

class FolderDatasetTest : public ::testing::Test {
 protected:
  fs::path root = testing::scratch_dir("folder_ds");
};

TEST_F(FolderDatasetTest, CountsAndOrder) {
  for (int i = 0; i < 3; ++i) write_file(root / "b_dogs" / ("d" + std::to_string(i) + ".ppm"), encode_ppm(solid(2, 2, 200)));
  write_file(root / "a_cats" / "c0.ppm", encode_ppm(solid(5, 5, 20)));
  write_png(root / "a_cats" / "c1.png", solid(3, 3, 10));
  write_file(root / "a_cats" / "notes.txt", "ignored");
  const LabeledDataset ds = load_folder_dataset(root, 4, 3);
  EXPECT_EQ(ds.size(), 5u);
  EXPECT_EQ(ds.class_names, (std::vector<std::string>{"a_cats", "b_dogs"}));
  EXPECT_EQ(ds.class_counts(), (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(ds.skipped_files, 0u);
  EXPECT_EQ(ds.samples[0].image[0], 20 / 255.0);  // c0.ppm sorts before c1.png
  EXPECT_EQ(ds.samples[1].image[0], 10 / 255.0);
  for (const Sample& s : ds.samples) EXPECT_EQ(s.image.shape(), (Shape{4, 4, 3}));

  const LabeledDataset again = load_folder_dataset(root, 4, 3);
  for (std::size_t i = 0; i < ds.size(); ++i) EXPECT_EQ(again.samples[i].image, ds.samples[i].image);
}

TEST_F(FolderDatasetTest, SkipsUndecodableFiles) {
  write_file(root / "x" / "ok.ppm", encode_ppm(solid(1, 1, 1)));
  write_file(root / "x" / "broken.ppm", "P6\n4 4\n255\nshort");
  write_file(root / "y" / "ok.ppm", encode_ppm(solid(1, 1, 2)));
  const LabeledDataset ds = load_folder_dataset(root, 2, 1);
  EXPECT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.skipped_files, 1u);
}

TEST_F(FolderDatasetTest, EmptyClassIsHardError) {
  write_file(root / "x" / "ok.ppm", encode_ppm(solid(1, 1, 1)));
  fs::create_directories(root / "y");
  EXPECT_THROW(load_folder_dataset(root, 2), ConfigError);
}

TEST_F(FolderDatasetTest, MissingRootOrSingleClass) {
  EXPECT_THROW(load_folder_dataset(root / "nope", 2), ConfigError);
  write_file(root / "only" / "a.ppm", encode_ppm(solid(1, 1, 1)));
  EXPECT_THROW(load_folder_dataset(root, 2), ConfigError);
}

LabeledDataset counted_dataset(const std::vector<std::size_t>& counts) {
  LabeledDataset ds;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    ds.class_names.push_back("c" + std::to_string(c));
    for (std::size_t i = 0; i < counts[c]; ++i) {
      ds.samples.push_back({Tensor(Shape{1, 1, 1}, static_cast<double>(ds.samples.size())), c,
                            ds.samples.size()});
    }
  }
  return ds;
}

TEST(SplitTest, FloorRule) {
  EXPECT_EQ(train_count(3000, 0.8), 2400u);
  EXPECT_EQ(train_count(155, 0.8), 124u);
  EXPECT_EQ(train_count(98, 0.8), 78u);
  EXPECT_EQ(train_count(5, 0.8), 4u);  // 0.8 · 5 is 3.9999… in binary
  EXPECT_EQ(train_count(2, 0.5), 1u);
}

TEST(SplitTest, UnevenClasses) {
  const auto [train, test] = split(counted_dataset({155, 98}), 0.8, 1);
  EXPECT_EQ(train.class_counts(), (std::vector<std::size_t>{124, 78}));
  EXPECT_EQ(test.class_counts(), (std::vector<std::size_t>{31, 20}));
}

TEST(SplitTest, HalfOfTwo) {
  const auto [train, test] = split(counted_dataset({2, 2, 2}), 0.5, 3);
  EXPECT_EQ(train.class_counts(), (std::vector<std::size_t>{1, 1, 1}));
  EXPECT_EQ(test.class_counts(), (std::vector<std::size_t>{1, 1, 1}));
}

TEST(SplitTest, PartitionAndStratificationProperties) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 2 + rng() % 4;
    std::vector<std::size_t> counts(k);
    for (auto& c : counts) c = 2 + rng() % 40;
    const double ratio = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
    const LabeledDataset ds = counted_dataset(counts);
    const auto [train, test] = split(ds, ratio, trial);

    std::multiset<std::size_t> seen;
    for (const auto& s : train.samples) seen.insert(s.id);
    for (const auto& s : test.samples) seen.insert(s.id);
    std::multiset<std::size_t> all;
    for (const auto& s : ds.samples) all.insert(s.id);
    EXPECT_EQ(seen, all);

    const auto tc = train.class_counts();
    for (std::size_t c = 0; c < k; ++c) {
      const double frac = static_cast<double>(tc[c]) / static_cast<double>(counts[c]);
      EXPECT_LE(std::abs(frac - ratio), 1.0 / static_cast<double>(counts[c]) + 1e-12);
    }
  }
}

TEST(SplitTest, SeededShuffle) {
  const LabeledDataset ds = counted_dataset({20, 20});
  auto ids = [](const LabeledDataset& d) {
    std::vector<std::size_t> v;
    for (const auto& s : d.samples) v.push_back(s.id);
    return v;
  };
  EXPECT_EQ(ids(split(ds, 0.8, 5).first), ids(split(ds, 0.8, 5).first));
  EXPECT_NE(ids(split(ds, 0.8, 5).first), ids(split(ds, 0.8, 6).first));
}

TEST(SplitTest, Errors) {
  EXPECT_THROW(split(counted_dataset({1, 5}), 0.8, 0), ConfigError);
  EXPECT_THROW(split(counted_dataset({5, 5}), 0.0, 0), ConfigError);
  EXPECT_THROW(split(counted_dataset({5, 5}), 1.0, 0), ConfigError);
}

TEST(SynthTest, DeterministicAndShaped) {
  const LabeledDataset a = synth_dataset(4, 5, 16, 9);
  const LabeledDataset b = synth_dataset(4, 5, 16, 9);
  ASSERT_EQ(a.size(), 20u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.samples[i].image, b.samples[i].image);
    EXPECT_EQ(a.samples[i].label, b.samples[i].label);
    EXPECT_EQ(a.samples[i].image.shape(), (Shape{16, 16, 1}));
  }
  EXPECT_EQ(a.class_counts(), (std::vector<std::size_t>{5, 5, 5, 5}));
  EXPECT_NE(synth_dataset(4, 5, 16, 10).samples[0].image, a.samples[0].image);
}

TEST(SynthTest, NoiselessClassesAreConstant) {
  const LabeledDataset ds = synth_dataset(4, 6, 16, 2, 1, 0.0);
  for (const Sample& s : ds.samples) EXPECT_EQ(s.image, ds.samples[s.label * 6].image);
  // Class 0 lights the top-left quadrant.
  const Tensor& img = ds.samples[0].image;
  EXPECT_EQ(img[0], kSynthForeground);
  EXPECT_EQ(img[15], kSynthBackground);
  EXPECT_EQ(img[8 * 16 + 8], kSynthBackground);
}

TEST(SynthTest, NearestCentroidIsPerfect) {
  const LabeledDataset ds = synth_dataset(4, 50, 16, 11, 1, 0.1);
  std::vector<Tensor> centroids(4, Tensor(Shape{16, 16, 1}));
  for (const Sample& s : ds.samples) centroids[s.label] = add(centroids[s.label], s.image);
  for (Tensor& c : centroids) c = scale(c, 1.0 / 50.0);
  std::size_t correct = 0;
  for (const Sample& s : ds.samples) {
    std::size_t best = 0;
    double best_d = 1e300;
    for (std::size_t k = 0; k < 4; ++k) {
      const Tensor d = sub(s.image, centroids[k]);
      const double dist = sum(mul(d, d));
      if (dist < best_d) best_d = dist, best = k;
    }
    correct += best == s.label;
  }
  EXPECT_EQ(correct, ds.size());
}

TEST(SynthTest, Errors) {
  EXPECT_THROW(synth_dataset(1, 5, 16, 0), ConfigError);
  EXPECT_THROW(synth_dataset(10, 5, 2, 0), ConfigError);
}

}  // namespace
}  // namespace resvit
