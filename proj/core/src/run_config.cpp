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

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace resvit {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + text + "'");
  }
  return v;
}

template <typename U>
U parse_unsigned(const std::string& key, const std::string& text) {
  U v{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" + text +
                      "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("config key '" + key + "': expected true or false, got '" + text + "'");
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "image_size", "channels",  "patch_size", "embed_dim",       "depth",       "heads",
      "mlp_dim",    "num_classes", "variant",  "norm",            "seed",        "epochs",
      "batch_size", "lr",        "optimizer",  "beta1",           "beta2",       "adam_eps",
      "data",       "out",       "split_ratio", "synth_per_class", "synth_noise", "dump_attention"};
  return keys;
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, value).second) {
      throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  return kv;
}

std::string format_key_values(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

KeyValues read_key_value_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_key_values(buf.str());
}

RunConfig RunConfig::from_key_values(const KeyValues& kv) {
  for (const auto& [k, v] : kv) {
    if (!known_keys().count(k)) throw ConfigError("unknown config key '" + k + "'");
  }
  RunConfig rc;
  rc.model = ViTConfig::from_key_values(kv);
  auto get = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  if (auto v = get("epochs")) rc.train.epochs = parse_unsigned<std::size_t>("epochs", *v);
  if (auto v = get("batch_size")) rc.train.batch_size = parse_unsigned<std::size_t>("batch_size", *v);
  if (auto v = get("lr")) rc.train.learning_rate = parse_double("lr", *v);
  if (auto v = get("optimizer")) rc.train.optimizer = parse_optimizer(*v);
  if (auto v = get("beta1")) rc.train.beta1 = parse_double("beta1", *v);
  if (auto v = get("beta2")) rc.train.beta2 = parse_double("beta2", *v);
  if (auto v = get("adam_eps")) rc.train.adam_eps = parse_double("adam_eps", *v);
  if (auto v = get("data")) rc.data = *v;
  if (auto v = get("out")) rc.out = *v;
  if (auto v = get("split_ratio")) rc.split_ratio = parse_double("split_ratio", *v);
  if (auto v = get("synth_per_class")) {
    rc.synth_per_class = parse_unsigned<std::size_t>("synth_per_class", *v);
  }
  if (auto v = get("synth_noise")) rc.synth_noise = parse_double("synth_noise", *v);
  if (auto v = get("dump_attention")) rc.dump_attention = parse_bool("dump_attention", *v);
  rc.apply_seed(get("seed") ? parse_unsigned<std::uint64_t>("seed", *get("seed")) : 0);
  return rc;
}

KeyValues RunConfig::to_key_values() const {
  KeyValues kv = model.to_key_values();
  kv["epochs"] = std::to_string(train.epochs);
  kv["batch_size"] = std::to_string(train.batch_size);
  kv["lr"] = format_double(train.learning_rate);
  kv["optimizer"] = std::string(to_string(train.optimizer));
  kv["beta1"] = format_double(train.beta1);
  kv["beta2"] = format_double(train.beta2);
  kv["adam_eps"] = format_double(train.adam_eps);
  kv["data"] = data;
  kv["out"] = out.string();
  kv["split_ratio"] = format_double(split_ratio);
  kv["synth_per_class"] = std::to_string(synth_per_class);
  kv["synth_noise"] = format_double(synth_noise);
  kv["dump_attention"] = dump_attention ? "true" : "false";
  kv["seed"] = std::to_string(seed);
  return kv;
}

void RunConfig::apply_seed(std::uint64_t new_seed) {
  seed = new_seed;
  model.seed = new_seed;
  train.seed = new_seed;
}

void RunConfig::validate() const {
  model.validate();
  train.validate();
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw ConfigError("split_ratio must be in (0, 1)");
  if (data.empty()) throw ConfigError("data must be a folder path or 'synthetic'");
  if (data == "synthetic" && synth_per_class < 2) {
    throw ConfigError("synth_per_class must be at least 2");
  }
  if (synth_noise < 0.0) throw ConfigError("synth_noise must be non-negative");
}

}  // namespace resvit
