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

// Binary model checkpoint. All integers and floats little-endian:
//
//   magic        8 bytes  "RESVITCK"
//   version      u32      1
//   config_len   u32      byte length of the config block
//   config       bytes    "key=value\n" lines, keys sorted (ViTConfig)
//   param_count  u32
//   param_count times:
//     name_len   u32
//     name       bytes
//     rank       u32
//     dims       u64 × rank
//     data       f64 × product(dims), row-major
//
// Saving and loading round-trips every parameter bit-exactly.

#include <filesystem>
#include <string>

#include "resvit/vit.hpp"

namespace resvit {

inline constexpr char kCheckpointMagic[8] = {'R', 'E', 'S', 'V', 'I', 'T', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string serialize_checkpoint(const ModelState& state);
ModelState deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path, const ModelState& state);
ModelState load_checkpoint(const std::filesystem::path& path);

}  // namespace resvit
