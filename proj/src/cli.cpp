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

#include "laren/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "laren/checkpoint.hpp"
#include "laren/config.hpp"
#include "laren/ltsr.hpp"
#include "laren/metrics.hpp"
#include "laren/model.hpp"
#include "laren/synthdata.hpp"

namespace laren::cli {

namespace {

namespace fs = std::filesystem;

constexpr const char* kCheckpointName = "checkpoint.ltck";
constexpr const char* kMetricsName = "metrics.csv";
constexpr const char* kMetricsHeader = "step,l_mse,l_per,l_adv,total,psnr";
constexpr double kGradcheckTolerance = 1e-4;
constexpr double kGradcheckStep = 1e-5;
constexpr Eigen::Index kGradcheckPerTensor = 16;

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

RunConfig load_config(const std::string& path) {
  RunConfig config = RunConfig::load(path);
  apply_seed_override(config);
  config.validate();
  return config;
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());
}

Dataset load_matching(const fs::path& dir, const ModelConfig& config) {
  Dataset data = load_dataset(dir);
  require(data.hr_size == config.hr_size && data.scale == config.scale, ErrorCode::kShapeMismatch,
          "dataset in " + dir.string() + " is " + std::to_string(data.hr_size) + "px at x" +
              std::to_string(data.scale) + ", the model expects " + std::to_string(config.hr_size) + "px at x" +
              std::to_string(config.scale));
  return data;
}

std::string metrics_row(const StepMetrics& m) {
  std::ostringstream row;
  row << m.step << ',' << fmt("%.10g", m.l_mse) << ',' << fmt("%.10g", m.l_per) << ',' << fmt("%.10g", m.l_adv)
      << ',' << fmt("%.10g", m.total) << ',' << fmt("%.10g", m.psnr) << '\n';
  return row.str();
}

/// Keeps the header and the rows before `step`, so a resumed run does not
/// repeat rows written after its last checkpoint.
std::string metrics_prefix(const fs::path& path, std::int64_t step) {
  std::string kept = std::string(kMetricsHeader) + "\n";
  if (!fs::exists(path)) return kept;
  std::istringstream in(read_file(path));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::int64_t row_step = 0;
    try {
      row_step = std::stoll(line.substr(0, line.find(',')));
    } catch (const std::logic_error&) {
      fail(ErrorCode::kIoError, "malformed row in " + path.string() + ": " + line);
    }
    if (row_step >= step) break;
    kept += line + "\n";
  }
  return kept;
}

/// Architecture and seed must match for a checkpoint to be resumed.
void require_same_architecture(const ModelConfig& a, const ModelConfig& b) {
  const bool same = a.gdm.latent_dim == b.gdm.latent_dim && a.gdm.layers == b.gdm.layers &&
                    a.gdm.nodes == b.gdm.nodes && a.gdm.node_dim == b.gdm.node_dim &&
                    a.gdm.filters == b.gdm.filters && a.code_dim == b.code_dim && a.hr_size == b.hr_size &&
                    a.scale == b.scale && a.gen_width == b.gen_width && a.gdm_mode == b.gdm_mode &&
                    a.cgm_mode == b.cgm_mode && a.seed == b.seed;
  require(same, ErrorCode::kShapeMismatch, "checkpoint architecture or seed differs from the config");
}

int gen_data(const std::string& config_path, const fs::path& out_dir, std::ostream& out) {
  const RunConfig config = load_config(config_path);
  const Dataset data = make_dataset(config.samples, config.model.hr_size, config.model.scale, config.model.seed);
  make_dir(out_dir);
  write_dataset(data, out_dir);
  out << "wrote " << data.samples.size() << " samples to " << out_dir.string() << "\n";
  return kOk;
}

int train(const std::string& config_path, const fs::path& data_dir, const fs::path& out_dir, std::ostream& out) {
  RunConfig config = load_config(config_path);
  const Dataset data = load_matching(data_dir, config.model);
  make_dir(out_dir);
  const fs::path ckpt = out_dir / kCheckpointName;
  const fs::path metrics = out_dir / kMetricsName;

  Model model = Model::create(config.model);
  if (fs::exists(ckpt)) {
    LoadedRun resumed = load_checkpoint(ckpt);
    require_same_architecture(resumed.config.model, config.model);
    model = std::move(resumed.model);
    model.config = config.model;
    model.opt.config = config.model.adam;
    model.disc_opt.config = config.model.adam;
    out << "resuming at step " << model.step << "\n";
  }
  std::string log = metrics_prefix(metrics, model.step);
  write_file(metrics, log);

  std::ofstream csv(metrics, std::ios::binary | std::ios::app);
  require(static_cast<bool>(csv), ErrorCode::kIoError, "cannot append to " + metrics.string());
  while (model.step < config.iters) {
    const auto idx = batch_indices(config.model.seed, model.step, config.batch, data.train_count());
    std::vector<const SamplePair*> batch;
    for (auto i : idx) batch.push_back(&data.samples[i]);
    const StepMetrics m = train_step(model, batch);
    csv << metrics_row(m);
    if (model.step % config.checkpoint_every == 0 || model.step == config.iters) {
      csv.flush();
      save_checkpoint(ckpt, model, config);
      out << "step " << m.step << " total " << fmt("%.6f", m.total) << " psnr " << fmt("%.3f", m.psnr) << "\n";
    }
  }
  require(static_cast<bool>(csv), ErrorCode::kIoError, "cannot write " + metrics.string());
  if (!fs::exists(ckpt)) save_checkpoint(ckpt, model, config);
  return kOk;
}

int eval(const fs::path& ckpt, const fs::path& data_dir, std::ostream& out) {
  const LoadedRun run = load_checkpoint(ckpt);
  const EvalResult r = evaluate(run.model, load_matching(data_dir, run.config.model));
  out << "psnr " << fmt("%.6f", r.psnr) << "\n"
      << "baseline_psnr " << fmt("%.6f", r.baseline_psnr) << "\n"
      << "count " << r.count << "\n";
  return kOk;
}

int dci_cmd(const fs::path& ckpt, const fs::path& data_dir, std::ostream& out) {
  const LoadedRun run = load_checkpoint(ckpt);
  const Dataset data = load_matching(data_dir, run.config.model);
  const DciResult r = dci(collect_latents(run.model, data).g, data.attribute_matrix());
  out << "disentanglement " << fmt("%.6f", r.scores.disentanglement) << "\n"
      << "completeness " << fmt("%.6f", r.scores.completeness) << "\n"
      << "informativeness " << fmt("%.6f", r.scores.informativeness) << "\n";
  return kOk;
}

int corr(const fs::path& ckpt, const fs::path& data_dir, const std::string& rows_text, const std::string& cols_text,
         std::ostream& out) {
  const LoadedRun run = load_checkpoint(ckpt);
  const Dataset data = load_matching(data_dir, run.config.model);
  const IndexRange rows = IndexRange::parse(rows_text);
  const IndexRange cols = IndexRange::parse(cols_text);
  const LatentDump latents = collect_latents(run.model, data);
  const Tensor cz = correlation_matrix(latents.z);
  const Tensor cg = correlation_matrix(latents.g);
  const std::string z_block = dim_subset_report(cz, rows, cols);
  const std::string g_block = dim_subset_report(cg, rows, cols);
  out << "# space z\n" << z_block << "# space g\n" << g_block;
  out << "# mean_abs_off_diagonal z " << fmt("%.6f", mean_abs_off_diagonal(cz, rows, cols)) << " g "
      << fmt("%.6f", mean_abs_off_diagonal(cg, rows, cols)) << "\n";
  return kOk;
}

int gradcheck_cmd(const std::string& config_path, std::ostream& out) {
  const RunConfig config = load_config(config_path);
  Model model = Model::create(config.model);
  const SamplePair sample = make_sample(config.model.seed, 0, config.model.hr_size, config.model.scale);
  bool ok = true;
  for (const ModuleCheck& c : gradcheck_model(model, sample, kGradcheckStep, kGradcheckPerTensor)) {
    const bool pass = c.result.max_rel_error < kGradcheckTolerance;
    ok = ok && pass;
    out << c.path << ' ' << c.module << " max_rel_error " << fmt("%.3e", c.result.max_rel_error) << " checked "
        << c.result.checked << " skipped " << c.result.skipped << (pass ? " ok" : " FAIL") << "\n";
  }
  return ok ? kOk : kNumericalError;
}

int synth(const fs::path& ckpt, const fs::path& lr_path, const fs::path& out_path, std::ostream& out) {
  const LoadedRun run = load_checkpoint(ckpt);
  const Tensor lr = read_ppm(lr_path);
  const Eigen::Index size = run.config.model.lr_size();
  require(lr.rank() == 3 && lr.dim(0) == 3 && lr.dim(1) == size && lr.dim(2) == size, ErrorCode::kShapeMismatch,
          "input is " + shape_string(lr.shape()) + ", the model expects 3x" + std::to_string(size) + "x" +
              std::to_string(size));
  if (out_path.has_parent_path()) make_dir(out_path.parent_path());
  write_ppm(out_path, super_resolve(run.model, lr, eval_noise_stream(0)));
  out << "wrote " << out_path.string() << "\n";
  return kOk;
}

}  // namespace

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIoError:
    case ErrorCode::kMissingFile:
      return kIoError;
    case ErrorCode::kNonFinite:
    case ErrorCode::kNonFiniteLoss:
    case ErrorCode::kTooFewSamples:
    case ErrorCode::kDegenerateAttributes:
      return kNumericalError;
    default:
      return kConfigError;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Latent multi-relation reasoning for GAN-prior super-resolution", "laren"};
  app.require_subcommand(1);
  std::string config, ckpt, rows, cols, lr;
  fs::path data, out_dir, out_img;

  auto* gen = app.add_subcommand("gen-data", "Render the synthetic dataset");
  gen->add_option("--config", config)->required();
  gen->add_option("--out", out_dir)->required();

  auto* tr = app.add_subcommand("train", "Train (or resume) a model");
  tr->add_option("--config", config)->required();
  tr->add_option("--data", data)->required();
  tr->add_option("--out", out_dir)->required();

  auto* ev = app.add_subcommand("eval", "Held-out PSNR against box upsampling");
  ev->add_option("--ckpt", ckpt)->required();
  ev->add_option("--data", data)->required();

  auto* dc = app.add_subcommand("dci", "DCI scores of the G latents");
  dc->add_option("--ckpt", ckpt)->required();
  dc->add_option("--data", data)->required();

  auto* co = app.add_subcommand("corr", "Latent correlation slices for z and G");
  co->add_option("--ckpt", ckpt)->required();
  co->add_option("--data", data)->required();
  co->add_option("--rows", rows)->required();
  co->add_option("--cols", cols)->required();

  auto* gc = app.add_subcommand("gradcheck", "Finite-difference check of every trainable module");
  gc->add_option("--config", config)->required();

  auto* sy = app.add_subcommand("synth", "Super-resolve one PPM image");
  sy->add_option("--ckpt", ckpt)->required();
  sy->add_option("--lr", lr)->required();
  sy->add_option("--out", out_img)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "laren: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (*gen) return gen_data(config, out_dir, out);
    if (*tr) return train(config, data, out_dir, out);
    if (*ev) return eval(ckpt, data, out);
    if (*dc) return dci_cmd(ckpt, data, out);
    if (*co) return corr(ckpt, data, rows, cols, out);
    if (*gc) return gradcheck_cmd(config, out);
    return synth(ckpt, lr, out_img, out);
  } catch (const Error& e) {
    err << "laren: " << e.what() << "\n";
    return exit_code(e.code());
  }
}

}  // namespace laren::cli
