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

#include "laren/checkpoint.hpp"

#include <sstream>

#include "laren/error.hpp"
#include "laren/ltsr.hpp"

namespace laren {

namespace {

constexpr std::string_view kMagic = "LTCK1";

void put_tensors(std::string& out, const std::string& prefix, const ParameterSet& set) {
  for (const auto& [name, t] : set) {
    const std::string full = prefix + name;
    put_u32(out, static_cast<std::uint32_t>(full.size()));
    out += full;
    out += encode_ltsr(t);
  }
}

std::int64_t read_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used == value.size()) return v;
  } catch (const std::logic_error&) {
  }
  fail(ErrorCode::kIoError, "checkpoint metadata '" + key + "' is not an integer");
}

}  // namespace

std::string encode_checkpoint(const Model& model, const RunConfig& config) {
  std::ostringstream meta;
  meta << "step = " << model.step << "\n"
       << "opt_step = " << model.opt.step << "\n"
       << "disc_opt_step = " << model.disc_opt.step << "\n"
       << "generator_seed = " << model.generator.seed << "\n"
       << "[config]\n";
  RunConfig snapshot = config;
  snapshot.model = model.config;
  meta << snapshot.to_text();
  const std::string text = meta.str();

  std::string out(kMagic);
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  const std::size_t count =
      model.params.size() + model.opt.m.size() + model.opt.v.size() + model.disc_opt.m.size() + model.disc_opt.v.size();
  put_u32(out, static_cast<std::uint32_t>(count));
  put_tensors(out, "param/", model.params);
  put_tensors(out, "opt.m/", model.opt.m);
  put_tensors(out, "opt.v/", model.opt.v);
  put_tensors(out, "dopt.m/", model.disc_opt.m);
  put_tensors(out, "dopt.v/", model.disc_opt.v);
  return out;
}

LoadedRun decode_checkpoint(const std::string& bytes) {
  require(bytes.compare(0, kMagic.size(), kMagic) == 0, ErrorCode::kIoError, "not a checkpoint (bad magic)");
  std::size_t pos = kMagic.size();
  std::string_view view(bytes);
  try {
    const std::uint32_t meta_len = get_u32(view, pos);
    require(pos + meta_len <= bytes.size(), ErrorCode::kIoError, "truncated checkpoint metadata");
    const std::string meta = bytes.substr(pos, meta_len);
    pos += meta_len;
    const auto split = meta.find("[config]\n");
    require(split != std::string::npos, ErrorCode::kIoError, "checkpoint metadata lacks a config section");

    std::int64_t step = 0, opt_step = 0, disc_opt_step = 0;
    std::istringstream state(meta.substr(0, split));
    std::string line;
    while (std::getline(state, line)) {
      const auto eq = line.find(" = ");
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(0, eq), value = line.substr(eq + 3);
      if (key == "step") step = read_int(key, value);
      if (key == "opt_step") opt_step = read_int(key, value);
      if (key == "disc_opt_step") disc_opt_step = read_int(key, value);
    }
    RunConfig config = RunConfig::parse(meta.substr(split + 9));
    LoadedRun run{config, Model::create(config.model)};
    run.model.step = step;
    run.model.opt.step = opt_step;
    run.model.disc_opt.step = disc_opt_step;

    const std::uint32_t count = get_u32(view, pos);
    std::size_t params_seen = 0;
    for (std::uint32_t i = 0; i < count; ++i) {
      const std::uint32_t len = get_u32(view, pos);
      require(pos + len <= bytes.size(), ErrorCode::kIoError, "truncated checkpoint tensor name");
      const std::string name = bytes.substr(pos, len);
      pos += len;
      std::size_t used = 0;
      Tensor t = decode_ltsr(view.substr(pos), &used);
      pos += used;
      const auto slash = name.find('/');
      require(slash != std::string::npos, ErrorCode::kIoError, "bad checkpoint tensor name '" + name + "'");
      const std::string group = name.substr(0, slash), key = name.substr(slash + 1);
      if (group == "param") {
        require(run.model.params.contains(key), ErrorCode::kShapeMismatch,
                "checkpoint parameter '" + key + "' does not exist in the configured model");
        require(run.model.params.at(key).shape() == t.shape(), ErrorCode::kShapeMismatch,
                "checkpoint parameter '" + key + "' has shape " + shape_string(t.shape()) + ", config expects " +
                    shape_string(run.model.params.at(key).shape()));
        run.model.params.set(key, std::move(t));
        ++params_seen;
      } else if (group == "opt.m") {
        run.model.opt.m.set(key, std::move(t));
      } else if (group == "opt.v") {
        run.model.opt.v.set(key, std::move(t));
      } else if (group == "dopt.m") {
        run.model.disc_opt.m.set(key, std::move(t));
      } else if (group == "dopt.v") {
        run.model.disc_opt.v.set(key, std::move(t));
      } else {
        fail(ErrorCode::kIoError, "unknown checkpoint tensor group '" + group + "'");
      }
    }
    require(params_seen == run.model.params.size(), ErrorCode::kShapeMismatch,
            "checkpoint holds " + std::to_string(params_seen) + " of " + std::to_string(run.model.params.size()) +
                " model parameters");
    return run;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kShapeMismatch || e.code() == ErrorCode::kBadConfig) throw;
    fail(ErrorCode::kIoError, std::string("corrupt checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Model& model, const RunConfig& config) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  write_file(tmp, encode_checkpoint(model, config));
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  require(!ec, ErrorCode::kIoError, "cannot move checkpoint into place: " + ec.message());
}

LoadedRun load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(read_file(path)); }

}  // namespace laren
