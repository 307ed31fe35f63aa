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

#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "laren/cli.hpp"
#include "laren/ltsr.hpp"

using namespace laren;
namespace fs = std::filesystem;

namespace {

constexpr const char* kConfig =
    "latent_dim = 16\nlayers = 4\nnodes = 8\nnode_dim = 4\nfilters = 4\ncode_dim = 8\n"
    "hr_size = 8\nscale = 2\nsamples = 20\nbatch = 4\niters = 10\ncheckpoint_every = 4\nseed = 3\n";

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run laren_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct Workspace {
  fs::path root;

  explicit Workspace(const std::string& name) : root(fs::temp_directory_path() / ("laren_cli_" + name)) {
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Workspace() { fs::remove_all(root); }

  std::string path(const std::string& rel) const { return (root / rel).string(); }
  std::string config(const std::string& rel, const std::string& text) const {
    write_file(root / rel, text);
    return path(rel);
  }
};

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

bool same_tree(const fs::path& a, const fs::path& b) {
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    if (!fs::exists(b / e.path().filename())) return false;
    if (read_file(e.path()) != read_file(b / e.path().filename())) return false;
  }
  return files > 0 && files == static_cast<std::size_t>(std::distance(fs::directory_iterator(b), {}));
}

}  // namespace

TEST_CASE("gen-data") {
  Workspace ws("gen");
  const std::string cfg = ws.config("toy.cfg", kConfig);
  Run r = laren_cli({"gen-data", "--config", cfg, "--out", ws.path("d1")});
  CHECK(r.code == 0);
  CHECK(std::distance(fs::directory_iterator(ws.path("d1")), {}) == 1 + 4 * 20);
  CHECK(laren_cli({"gen-data", "--config", cfg, "--out", ws.path("d2")}).code == 0);
  CHECK(same_tree(ws.path("d1"), ws.path("d2")));

  setenv("LAREN_SEED", "4", 1);
  CHECK(laren_cli({"gen-data", "--config", cfg, "--out", ws.path("d3")}).code == 0);
  unsetenv("LAREN_SEED");
  CHECK(read_file(ws.path("d1/manifest.csv")) != read_file(ws.path("d3/manifest.csv")));

  Run bad = laren_cli({"gen-data", "--config", ws.config("bad.cfg", "layers = 4\nfliters = 2\n"), "--out", ws.path("x")});
  CHECK(bad.code == cli::kConfigError);
  CHECK(bad.err.find("fliters") != std::string::npos);
  CHECK(laren_cli({"gen-data", "--config", cfg}).code == cli::kConfigError);
  CHECK(laren_cli({"frobnicate"}).code == cli::kConfigError);
}

TEST_CASE("train, resume and the read-only commands") {
  Workspace ws("train");
  const std::string cfg = ws.config("toy.cfg", kConfig);
  const std::string data = ws.path("data");
  REQUIRE(laren_cli({"gen-data", "--config", cfg, "--out", data}).code == 0);

  const auto t0 = std::chrono::steady_clock::now();
  Run r = laren_cli({"train", "--config", cfg, "--data", data, "--out", ws.path("a")});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(r.code == 0);
  CHECK(secs < 60.0);
  const std::string metrics = read_file(ws.path("a/metrics.csv"));
  CHECK(metrics.rfind("step,l_mse,l_per,l_adv,total,psnr\n", 0) == 0);
  CHECK(count_lines(metrics) == 11);
  CHECK(fs::exists(ws.path("a/checkpoint.ltck")));

  REQUIRE(laren_cli({"train", "--config", cfg, "--data", data, "--out", ws.path("b")}).code == 0);
  CHECK(same_tree(ws.path("a"), ws.path("b")));

  SUBCASE("resume continues the step numbering") {
    const std::string longer = ws.config("longer.cfg", std::string(kConfig) + "iters = 15\n");
    Run resumed = laren_cli({"train", "--config", longer, "--data", data, "--out", ws.path("a")});
    CHECK(resumed.code == 0);
    CHECK(resumed.out.find("resuming at step 10") != std::string::npos);
    const std::string all = read_file(ws.path("a/metrics.csv"));
    CHECK(count_lines(all) == 16);
    CHECK(all.find("\n10,") != std::string::npos);
    CHECK(all.find("\n14,") != std::string::npos);
    CHECK(all.rfind(metrics, 0) == 0);

    // Same result as training 15 steps in one go.
    REQUIRE(laren_cli({"train", "--config", longer, "--data", data, "--out", ws.path("c")}).code == 0);
    CHECK(read_file(ws.path("c/metrics.csv")) == all);
    CHECK(read_file(ws.path("c/checkpoint.ltck")) == read_file(ws.path("a/checkpoint.ltck")));

    const std::string other = ws.config("other.cfg", std::string(kConfig) + "iters = 15\nnode_dim = 2\n");
    Run clash = laren_cli({"train", "--config", other, "--data", data, "--out", ws.path("a")});
    CHECK(clash.code == cli::kConfigError);
  }

  SUBCASE("eval, dci, corr, synth") {
    const std::string ckpt = ws.path("a/checkpoint.ltck");
    Run e1 = laren_cli({"eval", "--ckpt", ckpt, "--data", data});
    CHECK(e1.code == 0);
    CHECK(e1.out.rfind("psnr ", 0) == 0);
    CHECK(e1.out.find("count 4\n") != std::string::npos);
    CHECK(laren_cli({"eval", "--ckpt", ckpt, "--data", data}).out == e1.out);

    Run d1 = laren_cli({"dci", "--ckpt", ckpt, "--data", data});
    CHECK(d1.code == 0);
    CHECK(d1.out.find("disentanglement ") != std::string::npos);
    CHECK(d1.out.find("informativeness ") != std::string::npos);
    CHECK(laren_cli({"dci", "--ckpt", ckpt, "--data", data}).out == d1.out);

    Run c1 = laren_cli({"corr", "--ckpt", ckpt, "--data", data, "--rows", "1:4", "--cols", "1:6"});
    CHECK(c1.code == 0);
    CHECK(c1.out.find("# space z\ndim,1,2,3,4,5,6\n") != std::string::npos);
    CHECK(c1.out.find("# space g\n") != std::string::npos);
    CHECK(laren_cli({"corr", "--ckpt", ckpt, "--data", data, "--rows", "1:4", "--cols", "1:6"}).out == c1.out);
    CHECK(laren_cli({"corr", "--ckpt", ckpt, "--data", data, "--rows", "1:40", "--cols", "1:6"}).code ==
          cli::kConfigError);

    CHECK(laren_cli({"synth", "--ckpt", ckpt, "--lr", data + "/lr_00003.ppm", "--out", ws.path("s/one.ppm")}).code ==
          0);
    CHECK(laren_cli({"synth", "--ckpt", ckpt, "--lr", data + "/lr_00003.ppm", "--out", ws.path("s/two.ppm")}).code ==
          0);
    CHECK(read_file(ws.path("s/one.ppm")) == read_file(ws.path("s/two.ppm")));
    CHECK(read_file(ws.path("s/one.ppm")).rfind("P6\n8 8\n255\n", 0) == 0);
    CHECK(laren_cli({"synth", "--ckpt", ckpt, "--lr", data + "/hr_00003.ppm", "--out", ws.path("s/x.ppm")}).code ==
          cli::kConfigError);

    CHECK(laren_cli({"eval", "--ckpt", ws.path("nope.ltck"), "--data", data}).code == cli::kIoError);
    CHECK(laren_cli({"eval", "--ckpt", ckpt, "--data", ws.path("nodata")}).code == cli::kIoError);
  }
}

TEST_CASE("gradcheck command") {
  Workspace ws("gradcheck");
  Run r = laren_cli({"gradcheck", "--config", ws.config("toy.cfg", kConfig)});
  CHECK(count_lines(r.out) == 7);
  const bool all_ok = r.out.find("FAIL") == std::string::npos;
  CHECK(r.code == (all_ok ? cli::kOk : cli::kNumericalError));
  CHECK(r.out.find("discriminator disc") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(cli::exit_code(ErrorCode::kBadConfig) == 2);
  CHECK(cli::exit_code(ErrorCode::kShapeMismatch) == 2);
  CHECK(cli::exit_code(ErrorCode::kMissingFile) == 3);
  CHECK(cli::exit_code(ErrorCode::kIoError) == 3);
  CHECK(cli::exit_code(ErrorCode::kNonFiniteLoss) == 4);
}
