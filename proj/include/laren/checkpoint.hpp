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

#include <filesystem>
#include <string>

#include "laren/config.hpp"
#include "laren/model.hpp"

namespace laren {

/// Single-file container:
///   "LTCK1", u32 metadata length, metadata text, u32 tensor count,
///   then per tensor: u32 name length, name, LTSR bytes.
/// The metadata holds the step counters, the generator seed and the run
/// config in its `key = value` form. Tensors are the trainable parameters
/// (param/<name>) and both Adam states (opt.m/, opt.v/, dopt.m/, dopt.v/).
/// Frozen networks are rebuilt from the seed.
std::string encode_checkpoint(const Model& model, const RunConfig& config);

struct LoadedRun {
  RunConfig config;
  Model model;
};
LoadedRun decode_checkpoint(const std::string& bytes);

/// Writes through a temporary file and renames it into place.
void save_checkpoint(const std::filesystem::path& path, const Model& model, const RunConfig& config);
LoadedRun load_checkpoint(const std::filesystem::path& path);

}  // namespace laren
