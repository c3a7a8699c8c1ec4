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

#include "resvit/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <sstream>

#include "resvit/run_config.hpp"

namespace resvit {

namespace {

template <typename U>
void put(std::string& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xffu));
  }
}

void put_f64(std::string& out, double value) { put(out, std::bit_cast<std::uint64_t>(value)); }

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename U>
  U get() {
    need(sizeof(U));
    U value = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      value |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(U);
    return value;
  }

  double get_f64() { return std::bit_cast<double>(get<std::uint64_t>()); }

  std::string get_bytes(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw IoError("checkpoint: truncated file");
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_checkpoint(const ModelState& state) {
  std::string out(kCheckpointMagic, sizeof(kCheckpointMagic));
  put<std::uint32_t>(out, kCheckpointVersion);

  const std::string config = format_key_values(state.config.to_key_values());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(config.size()));
  out += config;

  put<std::uint32_t>(out, static_cast<std::uint32_t>(state.params.size()));
  for (const Parameter& p : state.params) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p.name.size()));
    out += p.name;
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p.value.rank()));
    for (std::size_t d : p.value.shape()) put<std::uint64_t>(out, d);
    for (double v : p.value.data()) put_f64(out, v);
  }
  return out;
}

ModelState deserialize_checkpoint(const std::string& bytes) {
  Reader in(bytes);
  if (in.get_bytes(sizeof(kCheckpointMagic)) !=
      std::string(kCheckpointMagic, sizeof(kCheckpointMagic))) {
    throw IoError("checkpoint: bad magic");
  }
  if (const auto version = in.get<std::uint32_t>(); version != kCheckpointVersion) {
    throw IoError("checkpoint: unsupported version " + std::to_string(version));
  }
  const auto config_len = in.get<std::uint32_t>();
  ModelState state;
  state.config = ViTConfig::from_key_values(parse_key_values(in.get_bytes(config_len)));
  state.config.validate();

  const auto count = in.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = in.get_bytes(in.get<std::uint32_t>());
    const auto rank = in.get<std::uint32_t>();
    Shape shape(rank);
    for (auto& d : shape) d = static_cast<std::size_t>(in.get<std::uint64_t>());
    std::vector<double> data(shape_size(shape));
    for (auto& v : data) v = in.get_f64();
    state.params.add(std::move(name), Tensor(std::move(shape), std::move(data)));
  }
  if (!in.done()) throw IoError("checkpoint: trailing bytes");
  state.layout = ModelLayout::resolve(state.params, state.config);
  return state;
}

void save_checkpoint(const std::filesystem::path& path, const ModelState& state) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write checkpoint " + path.string());
  const std::string bytes = serialize_checkpoint(state);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw IoError("failed writing checkpoint " + path.string());
}

ModelState load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint " + path.string());
  std::ostringstream buf;
  buf << is.rdbuf();
  return deserialize_checkpoint(buf.str());
}

}  // namespace resvit
