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

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "resvit/tensor.hpp"

namespace resvit {

struct Sample {
  Tensor image;       ///< [H, W, C], values in [0, 1]
  std::size_t label = 0;
  std::size_t id = 0;  ///< position in the dataset it was loaded or generated into
};

struct LabeledDataset {
  std::vector<Sample> samples;
  std::vector<std::string> class_names;
  /// Files that looked like images but failed to decode.
  std::size_t skipped_files = 0;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  std::size_t num_classes() const noexcept { return class_names.size(); }
  std::vector<std::size_t> class_counts() const;
};

/// 8-bit interleaved RGB raster.
struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  ///< height × width × 3
};

/// Binary Netpbm P6. Header comments are accepted; maxval must be in
/// [1, 255] and samples are rescaled to 0..255 if it is below 255.
RgbImage decode_ppm(const std::string& bytes);
std::string encode_ppm(const RgbImage& image);

RgbImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const RgbImage& image);

/// Reads a .png or .ppm file by extension. Throws IoError if undecodable.
RgbImage read_image(const std::filesystem::path& path);

/// Nearest-neighbour resize to target×target and scale to [0, 1]. With
/// channels == 1 the three colour samples are averaged.
Tensor image_to_tensor(const RgbImage& image, std::size_t target_size, std::size_t channels);

/**
 * Loads root/<class>/<image>.{png,ppm}. Class names are the sorted
 * subdirectory names; files are visited in lexicographic order. Files that
 * fail to decode are skipped with a warning on stderr and counted.
 *
 * Throws ConfigError if root is missing, has fewer than two class folders,
 * or a class ends up with no decodable image.
 */
LabeledDataset load_folder_dataset(const std::filesystem::path& root, std::size_t target_size,
                                   std::size_t channels = 3);

/**
 * Stratified split: within each class, a seeded shuffle then
 * floor(ratio · count) samples to train and the rest to test.
 * Throws ConfigError if ratio is outside (0, 1) or a class has fewer than
 * two samples.
 */
std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& ds, double ratio,
                                                std::uint64_t seed);

/// Number of training samples split() assigns to a class of `count`.
std::size_t train_count(std::size_t count, double ratio);

/**
 * Synthetic classes on a g×g grid of cells, g = ceil(sqrt(num_classes)):
 * class k brightens cell k (quadrants when num_classes ≤ 4) on a dim
 * background, plus seeded uniform noise in [-noise, noise], clamped to
 * [0, 1]. Samples are ordered class by class.
 */
LabeledDataset synth_dataset(std::size_t num_classes, std::size_t per_class,
                             std::size_t image_size, std::uint64_t seed, std::size_t channels = 1,
                             double noise = 0.1);

inline constexpr double kSynthBackground = 0.2;
inline constexpr double kSynthForeground = 0.8;

}  // namespace resvit
