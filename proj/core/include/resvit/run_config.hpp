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
#include <map>
#include <string>

#include "resvit/train.hpp"
#include "resvit/vit.hpp"

namespace resvit {

using KeyValues = std::map<std::string, std::string>;

/// Parses "key = value" lines. Blank lines and lines starting with '#' are
/// skipped; surrounding whitespace is trimmed. Throws ConfigError on a line
/// without '=', an empty key, or a repeated key.
KeyValues parse_key_values(const std::string& text);

/// One "key=value" line per entry, in key order.
std::string format_key_values(const KeyValues& kv);

KeyValues read_key_value_file(const std::filesystem::path& path);

/**
 * Everything that determines a run. `seed` drives model initialisation,
 * the synthetic generator, the split, and the batch order, so one number
 * reproduces the whole run.
 */
struct RunConfig {
  ViTConfig model;
  TrainConfig train;
  std::string data = "synthetic";  ///< folder path or "synthetic"
  std::filesystem::path out = "runs/latest";
  double split_ratio = 0.8;
  std::size_t synth_per_class = 50;
  double synth_noise = 0.1;
  bool dump_attention = false;
  std::uint64_t seed = 0;

  /// Rejects unknown keys.
  static RunConfig from_key_values(const KeyValues& kv);
  KeyValues to_key_values() const;

  /// Copies `seed` into the model and train sections.
  void apply_seed(std::uint64_t new_seed);
  void validate() const;
};

}  // namespace resvit
