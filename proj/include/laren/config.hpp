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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "laren/model.hpp"

namespace laren {

/// Hyper-parameters of one run. Text form is one `key = value` per line;
/// `#` starts a comment. Keys:
///   latent_dim nodes node_dim layers filters code_dim hr_size scale
///   gen_width alpha beta lr batch iters samples seed checkpoint_every
///   gdm_mode (HMRR|VRR|AFFINE) cgm_mode (ReRR|VRR|NOISE)
struct RunConfig {
  ModelConfig model;
  std::size_t batch = 8;
  std::int64_t iters = 2000;
  std::size_t samples = 500;
  std::int64_t checkpoint_every = 100;

  /// Throws BadConfig naming the offending key or line.
  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::filesystem::path& path);
  /// Canonical text form; parse(to_text()) reproduces the config.
  std::string to_text() const;
  void validate() const;
};

/// LAREN_SEED, when set, replaces the configured seed.
void apply_seed_override(RunConfig& config);

}  // namespace laren
