// Copyright 2026 The LAREN Authors. All Rights Reserved.
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

#include "laren/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

#include "laren/error.hpp"
#include "laren/ltsr.hpp"

namespace laren {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used == value.size()) return v;
  } catch (const std::logic_error&) {
  }
  fail(ErrorCode::kBadConfig, "config key '" + key + "': expected an integer, got '" + value + "'");
}

std::int64_t parse_positive(const std::string& key, const std::string& value) {
  const std::int64_t v = parse_int(key, value);
  require(v > 0, ErrorCode::kBadConfig, "config key '" + key + "' must be positive");
  return v;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size()) return v;
  } catch (const std::logic_error&) {
  }
  fail(ErrorCode::kBadConfig, "config key '" + key + "': expected a number, got '" + value + "'");
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"latent_dim", [](RunConfig& c, auto& k, auto& v) { c.model.gdm.latent_dim = parse_positive(k, v); }},
      {"layers", [](RunConfig& c, auto& k, auto& v) { c.model.gdm.layers = parse_positive(k, v); }},
      {"nodes", [](RunConfig& c, auto& k, auto& v) { c.model.gdm.nodes = parse_positive(k, v); }},
      {"node_dim", [](RunConfig& c, auto& k, auto& v) { c.model.gdm.node_dim = parse_positive(k, v); }},
      {"filters", [](RunConfig& c, auto& k, auto& v) { c.model.gdm.filters = parse_positive(k, v); }},
      {"code_dim", [](RunConfig& c, auto& k, auto& v) { c.model.code_dim = parse_positive(k, v); }},
      {"hr_size", [](RunConfig& c, auto& k, auto& v) { c.model.hr_size = parse_positive(k, v); }},
      {"scale", [](RunConfig& c, auto& k, auto& v) { c.model.scale = parse_positive(k, v); }},
      {"gen_width", [](RunConfig& c, auto& k, auto& v) { c.model.gen_width = parse_positive(k, v); }},
      {"alpha", [](RunConfig& c, auto& k, auto& v) { c.model.weights.alpha = parse_double(k, v); }},
      {"beta", [](RunConfig& c, auto& k, auto& v) { c.model.weights.beta = parse_double(k, v); }},
      {"lr", [](RunConfig& c, auto& k, auto& v) { c.model.adam.lr = parse_double(k, v); }},
      {"batch", [](RunConfig& c, auto& k, auto& v) { c.batch = static_cast<std::size_t>(parse_positive(k, v)); }},
      {"iters", [](RunConfig& c, auto& k, auto& v) { c.iters = parse_int(k, v); }},
      {"samples", [](RunConfig& c, auto& k, auto& v) { c.samples = static_cast<std::size_t>(parse_positive(k, v)); }},
      {"seed", [](RunConfig& c, auto& k, auto& v) { c.model.seed = static_cast<std::uint64_t>(parse_int(k, v)); }},
      {"checkpoint_every", [](RunConfig& c, auto& k, auto& v) { c.checkpoint_every = parse_positive(k, v); }},
      {"gdm_mode", [](RunConfig& c, auto&, auto& v) { c.model.gdm_mode = parse_gdm_mode(v); }},
      {"cgm_mode", [](RunConfig& c, auto&, auto& v) { c.model.cgm_mode = parse_cgm_mode(v); }},
  };
  return table;
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos, ErrorCode::kBadConfig,
            "config line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto it = setters().find(key);
    require(it != setters().end(), ErrorCode::kBadConfig, "unknown config key '" + key + "'");
    require(!value.empty(), ErrorCode::kBadConfig, "config key '" + key + "' has no value");
    it->second(c, key, value);
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    fail(ErrorCode::kBadConfig, std::string("cannot read config: ") + e.what());
  }
  return parse(text);
}

std::string RunConfig::to_text() const {
  std::ostringstream out;
  const ModelConfig& m = model;
  out << "latent_dim = " << m.gdm.latent_dim << "\n"
      << "layers = " << m.gdm.layers << "\n"
      << "nodes = " << m.gdm.nodes << "\n"
      << "node_dim = " << m.gdm.node_dim << "\n"
      << "filters = " << m.gdm.filters << "\n"
      << "code_dim = " << m.code_dim << "\n"
      << "hr_size = " << m.hr_size << "\n"
      << "scale = " << m.scale << "\n"
      << "gen_width = " << m.gen_width << "\n"
      << "alpha = " << format_double(m.weights.alpha) << "\n"
      << "beta = " << format_double(m.weights.beta) << "\n"
      << "lr = " << format_double(m.adam.lr) << "\n"
      << "batch = " << batch << "\n"
      << "iters = " << iters << "\n"
      << "samples = " << samples << "\n"
      << "seed = " << m.seed << "\n"
      << "checkpoint_every = " << checkpoint_every << "\n"
      << "gdm_mode = " << to_string(m.gdm_mode) << "\n"
      << "cgm_mode = " << to_string(m.cgm_mode) << "\n";
  return out.str();
}

void RunConfig::validate() const {
  model.validate();
  require(iters >= 0, ErrorCode::kBadConfig, "iters must be non-negative");
}

void apply_seed_override(RunConfig& config) {
  if (const char* env = std::getenv("LAREN_SEED")) {
    config.model.seed = static_cast<std::uint64_t>(parse_int("LAREN_SEED", env));
  }
}

}  // namespace laren
