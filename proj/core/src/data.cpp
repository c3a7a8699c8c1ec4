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

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace resvit {

std::vector<std::size_t> LabeledDataset::class_counts() const {
  std::vector<std::size_t> counts(class_names.size(), 0);
  for (const auto& s : samples) ++counts.at(s.label);
  return counts;
}

// ---------------------------------------------------------------------------
// PPM

namespace {

class PpmHeaderReader {
 public:
  explicit PpmHeaderReader(const std::string& bytes) : b_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < b_.size()) {
      if (std::isspace(static_cast<unsigned char>(b_[pos_]))) {
        ++pos_;
      } else if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n' && b_[pos_] != '\r') ++pos_;
      } else {
        break;
      }
    }
  }

  unsigned long number(const char* what) {
    skip_space_and_comments();
    if (pos_ >= b_.size() || !std::isdigit(static_cast<unsigned char>(b_[pos_]))) {
      throw IoError(std::string("ppm: expected ") + what);
    }
    unsigned long v = 0;
    while (pos_ < b_.size() && std::isdigit(static_cast<unsigned char>(b_[pos_]))) {
      v = v * 10 + static_cast<unsigned long>(b_[pos_++] - '0');
      if (v > 1'000'000'000ul) throw IoError(std::string("ppm: ") + what + " too large");
    }
    return v;
  }

  std::size_t& pos() { return pos_; }

 private:
  const std::string& b_;
  std::size_t pos_ = 0;
};

}  // namespace

RgbImage decode_ppm(const std::string& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') throw IoError("ppm: missing P6 magic");
  PpmHeaderReader r(bytes);
  r.pos() = 2;
  const auto width = r.number("width");
  const auto height = r.number("height");
  const auto maxval = r.number("maxval");
  if (width == 0 || height == 0) throw IoError("ppm: zero dimension");
  if (maxval == 0 || maxval > 255) throw IoError("ppm: maxval must be in [1, 255]");
  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t& pos = r.pos();
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw IoError("ppm: missing whitespace after maxval");
  }
  ++pos;
  const std::size_t n = width * height * 3;
  if (bytes.size() - pos < n) throw IoError("ppm: truncated raster");

  RgbImage img{width, height, std::vector<std::uint8_t>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = static_cast<unsigned char>(bytes[pos + i]);
    if (v > maxval) throw IoError("ppm: sample exceeds maxval");
    img.pixels[i] = maxval == 255 ? v
                                  : static_cast<std::uint8_t>((v * 255u + maxval / 2) / maxval);
  }
  return img;
}

std::string encode_ppm(const RgbImage& image) {
  std::string out = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) +
                    "\n255\n";
  out.append(image.pixels.begin(), image.pixels.end());
  return out;
}

// ---------------------------------------------------------------------------
// PNG via libpng's simplified API

RgbImage read_png(const std::filesystem::path& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    throw IoError("png: " + path.string() + ": " + png.message);
  }
  png.format = PNG_FORMAT_RGB;
  RgbImage img{png.width, png.height, std::vector<std::uint8_t>(PNG_IMAGE_SIZE(png))};
  if (!png_image_finish_read(&png, nullptr, img.pixels.data(), 0, nullptr)) {
    std::string msg = png.message;
    png_image_free(&png);
    throw IoError("png: " + path.string() + ": " + msg);
  }
  return img;
}

void write_png(const std::filesystem::path& path, const RgbImage& image) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width);
  png.height = static_cast<png_uint_32>(image.height);
  png.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png, path.c_str(), 0, image.pixels.data(), 0, nullptr)) {
    throw IoError("png: cannot write " + path.string() + ": " + png.message);
  }
}

namespace {

std::string lower_extension(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

}  // namespace

RgbImage read_image(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".ppm") {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << is.rdbuf();
    return decode_ppm(buf.str());
  }
  throw IoError("unsupported image type: " + path.string());
}

Tensor image_to_tensor(const RgbImage& image, std::size_t target_size, std::size_t channels) {
  if (channels != 1 && channels != 3) throw ConfigError("images must have 1 or 3 channels");
  if (target_size == 0) throw ConfigError("target image size must be positive");
  Tensor out(Shape{target_size, target_size, channels});
  for (std::size_t y = 0; y < target_size; ++y) {
    const std::size_t sy = y * image.height / target_size;
    for (std::size_t x = 0; x < target_size; ++x) {
      const std::size_t sx = x * image.width / target_size;
      const std::uint8_t* px = image.pixels.data() + (sy * image.width + sx) * 3;
      const std::size_t base = (y * target_size + x) * channels;
      if (channels == 3) {
        for (std::size_t c = 0; c < 3; ++c) out[base + c] = px[c] / 255.0;
      } else {
        out[base] = (px[0] + px[1] + px[2]) / (3.0 * 255.0);
      }
    }
  }
  return out;
}

LabeledDataset load_folder_dataset(const std::filesystem::path& root, std::size_t target_size,
                                   std::size_t channels) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw ConfigError("dataset root not found: " + root.string());

  std::vector<fs::path> class_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) class_dirs.push_back(entry.path());
  }
  std::sort(class_dirs.begin(), class_dirs.end());
  if (class_dirs.size() < 2) {
    throw ConfigError("dataset root " + root.string() + " needs at least two class folders");
  }

  LabeledDataset ds;
  for (std::size_t label = 0; label < class_dirs.size(); ++label) {
    ds.class_names.push_back(class_dirs[label].filename().string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(class_dirs[label])) {
      const std::string ext = lower_extension(entry.path());
      if (entry.is_regular_file() && (ext == ".png" || ext == ".ppm")) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::size_t loaded = 0;
    for (const auto& f : files) {
      try {
        Tensor img = image_to_tensor(read_image(f), target_size, channels);
        ds.samples.push_back(Sample{std::move(img), label, ds.samples.size()});
        ++loaded;
      } catch (const IoError& e) {
        std::cerr << "warning: skipping " << f.string() << ": " << e.what() << '\n';
        ++ds.skipped_files;
      }
    }
    if (loaded == 0) {
      throw ConfigError("class folder " + class_dirs[label].string() + " has no decodable image");
    }
  }
  return ds;
}

std::size_t train_count(std::size_t count, double ratio) {
  // The epsilon absorbs representation error such as 0.8 · 5 = 3.9999...
  return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(count) + 1e-9));
}

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& ds, double ratio,
                                                std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split ratio must be in (0, 1)");
  std::vector<std::vector<std::size_t>> by_class(ds.num_classes());
  for (std::size_t i = 0; i < ds.samples.size(); ++i) by_class.at(ds.samples[i].label).push_back(i);

  LabeledDataset train, test;
  train.class_names = test.class_names = ds.class_names;
  std::mt19937_64 rng(seed);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& idx = by_class[c];
    if (idx.size() < 2) {
      throw ConfigError("class '" + ds.class_names[c] + "' has " + std::to_string(idx.size()) +
                        " sample(s); stratified split needs at least 2");
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    const std::size_t n_train = train_count(idx.size(), ratio);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      (k < n_train ? train : test).samples.push_back(ds.samples[idx[k]]);
    }
  }
  return {std::move(train), std::move(test)};
}

LabeledDataset synth_dataset(std::size_t num_classes, std::size_t per_class,
                             std::size_t image_size, std::uint64_t seed, std::size_t channels,
                             double noise) {
  if (num_classes < 2) throw ConfigError("synthetic dataset needs at least 2 classes");
  if (image_size == 0 || channels == 0) throw ConfigError("synthetic image size must be positive");
  std::size_t grid = 1;
  while (grid * grid < num_classes) ++grid;
  if (grid > image_size) throw ConfigError("synthetic image too small for the class grid");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);

  LabeledDataset ds;
  for (std::size_t k = 0; k < num_classes; ++k) ds.class_names.push_back("class" + std::to_string(k));

  for (std::size_t k = 0; k < num_classes; ++k) {
    const std::size_t cell_r = k / grid, cell_c = k % grid;
    const std::size_t y0 = cell_r * image_size / grid, y1 = (cell_r + 1) * image_size / grid;
    const std::size_t x0 = cell_c * image_size / grid, x1 = (cell_c + 1) * image_size / grid;
    for (std::size_t s = 0; s < per_class; ++s) {
      Tensor img(Shape{image_size, image_size, channels});
      for (std::size_t y = 0; y < image_size; ++y) {
        for (std::size_t x = 0; x < image_size; ++x) {
          const bool lit = y >= y0 && y < y1 && x >= x0 && x < x1;
          for (std::size_t c = 0; c < channels; ++c) {
            const double base = lit ? kSynthForeground : kSynthBackground;
            const double v = base + noise * uniform(rng);
            img[(y * image_size + x) * channels + c] = std::clamp(v, 0.0, 1.0);
          }
        }
      }
      ds.samples.push_back(Sample{std::move(img), k, ds.samples.size()});
    }
  }
  return ds;
}

}  // namespace resvit
