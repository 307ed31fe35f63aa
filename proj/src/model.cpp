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

#include "laren/model.hpp"

#include <cmath>

#include "laren/error.hpp"
#include "laren/metrics.hpp"
#include "laren/ops.hpp"

namespace laren {

namespace {

bool has_prefix(const std::string& name, const std::string& prefix) { return name.rfind(prefix, 0) == 0; }

DiscriminatorFn discriminator_of(const ModelConfig& config) {
  const ConvStackConfig disc = config.discriminator();
  return [disc](Var image) { return discriminate(image, disc); };
}

}  // namespace

void ModelConfig::validate() const {
  gdm.validate();
  cgm().validate();
  generator().validate();
  require(scale >= 1 && hr_size % scale == 0, ErrorCode::kBadConfig,
          "hr_size " + std::to_string(hr_size) + " is not divisible by scale " + std::to_string(scale));
  require(generator().output_resolution() == hr_size, ErrorCode::kBadConfig,
          "a " + std::to_string(gdm.layers) + "-layer generator renders " +
              std::to_string(generator().output_resolution()) + "x" + std::to_string(generator().output_resolution()) +
              ", not hr_size " + std::to_string(hr_size));
  require(weights.alpha >= 0.0 && weights.beta >= 0.0, ErrorCode::kBadConfig, "loss weights must be non-negative");
  require(adam.lr > 0.0, ErrorCode::kBadConfig, "learning rate must be positive");
}

Model Model::create(const ModelConfig& config) {
  config.validate();
  Model m;
  m.config = config;
  m.generator = Generator::create(config.generator(), config.seed);
  m.perceptual = Perceptual::create(config.seed);
  Rng rng(config.seed, streams::kInit);
  init_conv_stack(config.encoder(), "enc", rng, m.params);
  GdmParams::init(config.gdm, config.gdm_mode, rng).store(m.params);
  if (config.cgm_mode != CgmMode::kNoise) CgmParams::init(config.cgm(), rng).store(m.params);
  init_conv_stack(config.discriminator(), "disc", rng, m.params);
  m.opt.config = config.adam;
  m.disc_opt.config = config.adam;
  return m;
}

std::vector<std::string> Model::generator_side_names() const {
  std::vector<std::string> out;
  for (const auto& [name, value] : params) {
    if (!has_prefix(name, "disc.")) out.push_back(name);
  }
  return out;
}

std::vector<std::string> Model::discriminator_names() const {
  std::vector<std::string> out;
  for (const auto& [name, value] : params) {
    if (has_prefix(name, "disc.")) out.push_back(name);
  }
  return out;
}

std::uint64_t train_noise_stream(std::int64_t step, std::size_t slot) {
  return streams::kNoise + (static_cast<std::uint64_t>(step) << 10U) + slot;
}

std::uint64_t eval_noise_stream(std::uint64_t id) { return streams::kNoise + (1ULL << 31U) + id; }

std::vector<Tensor> noise_codes(const ModelConfig& config, std::uint64_t stream) {
  Rng rng(config.seed, stream);
  std::vector<Tensor> out;
  for (Eigen::Index n = 0; n < config.gdm.layers; ++n) out.push_back(rng_normal(rng, {config.code_dim}));
  return out;
}

ForwardPass forward(Graph& graph, const Model& model, const Tensor& lr, std::uint64_t noise_stream) {
  const ModelConfig& cfg = model.config;
  ForwardPass pass;
  pass.z = encode(graph.constant(lr), cfg.encoder());
  GdmOutput gdm = gdm_forward(pass.z, GdmVars::bind(graph, cfg.gdm_mode), cfg.gdm, cfg.gdm_mode);
  pass.g = std::move(gdm.codes);
  if (cfg.cgm_mode == CgmMode::kNoise) {
    for (auto& t : noise_codes(cfg, noise_stream)) pass.c.push_back(graph.constant(std::move(t)));
  } else {
    pass.c = cgm_forward(pass.g, CgmVars::bind(graph, cfg.cgm()), cfg.cgm(), cfg.cgm_mode);
  }
  pass.image = synthesize(pass.g, pass.c, model.generator);
  return pass;
}

Tensor super_resolve(const Model& model, const Tensor& lr, std::uint64_t noise_stream) {
  Graph graph(&model.params);
  return forward(graph, model, lr, noise_stream).image.value();
}

StepMetrics train_step(Model& model, const std::vector<const SamplePair*>& batch) {
  require(!batch.empty(), ErrorCode::kBadConfig, "empty batch");
  const ModelConfig& cfg = model.config;
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  const DiscriminatorFn disc = discriminator_of(cfg);
  StepMetrics out;
  out.step = model.step;

  std::vector<Tensor> fakes;
  {
    Graph graph(&model.params);
    Var total;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      ForwardPass pass = forward(graph, model, batch[i]->lr, train_noise_stream(model.step, i));
      LossTerms terms = total_loss(pass.image, graph.constant(batch[i]->hr), model.perceptual, disc, cfg.weights);
      total = total.valid() ? total + terms.total : terms.total;
      out.l_mse += terms.mse.value()[0] * inv_batch;
      out.l_per += terms.perceptual.value()[0] * inv_batch;
      out.l_adv += terms.adversarial.value()[0] * inv_batch;
      Tensor clamped = pass.image.value();
      clamped.values() = clamped.values().cwiseMax(-1.0).cwiseMin(1.0);
      out.psnr += psnr(clamped, batch[i]->hr, 2.0) * inv_batch;
      fakes.push_back(pass.image.value());
    }
    Var loss = scale(total, inv_batch);
    out.total = loss.value()[0];
    require(std::isfinite(out.total), ErrorCode::kNonFiniteLoss,
            "non-finite loss at step " + std::to_string(model.step));
    const GradientMap grads = graph.backward(loss);
    const auto names = model.generator_side_names();
    double sq = 0.0;
    for (const auto& name : names) sq += grads.at(name).values().squaredNorm();
    out.grad_norm = std::sqrt(sq);
    require(std::isfinite(out.grad_norm), ErrorCode::kNonFiniteLoss,
            "non-finite gradient at step " + std::to_string(model.step));
    adam_step(model.params, grads, model.opt, names);
  }

  if (cfg.weights.beta > 0.0) {
    Graph graph(&model.params);
    Var total;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      Var l = discriminator_loss(disc(graph.constant(batch[i]->hr)), disc(graph.constant(fakes[i])));
      total = total.valid() ? total + l : l;
    }
    Var loss = scale(total, inv_batch);
    out.disc_loss = loss.value()[0];
    require(std::isfinite(out.disc_loss), ErrorCode::kNonFiniteLoss,
            "non-finite discriminator loss at step " + std::to_string(model.step));
    adam_step(model.params, graph.backward(loss), model.disc_opt, model.discriminator_names());
  }
  ++model.step;
  return out;
}

std::vector<std::size_t> batch_indices(std::uint64_t seed, std::int64_t step, std::size_t batch, std::size_t pool) {
  require(pool >= 1, ErrorCode::kBadConfig, "no training samples");
  Rng rng(seed, streams::kBatch + static_cast<std::uint64_t>(step));
  std::vector<std::size_t> out(batch);
  for (auto& i : out) i = static_cast<std::size_t>(rng.next_u32()) % pool;
  return out;
}

Tensor box_upsample(const Tensor& lr, Eigen::Index factor) {
  require(lr.rank() == 3 && factor >= 1, ErrorCode::kDimMismatch, "box_upsample expects C x H x W");
  const Eigen::Index c = lr.dim(0), h = lr.dim(1), w = lr.dim(2);
  Tensor out = Tensor::zeros({c, h * factor, w * factor});
  for (Eigen::Index k = 0; k < c; ++k) {
    for (Eigen::Index y = 0; y < h * factor; ++y) {
      for (Eigen::Index x = 0; x < w * factor; ++x) out(k, y, x) = lr(k, y / factor, x / factor);
    }
  }
  return out;
}

EvalResult evaluate(const Model& model, const Dataset& data) {
  require(data.hr_size == model.config.hr_size && data.scale == model.config.scale, ErrorCode::kShapeMismatch,
          "dataset is " + std::to_string(data.hr_size) + "/" + std::to_string(data.scale) + " but the model expects " +
              std::to_string(model.config.hr_size) + "/" + std::to_string(model.config.scale));
  EvalResult r;
  const std::size_t begin = data.train_count();
  r.count = data.samples.size() - begin;
  require(r.count > 0, ErrorCode::kTooFewSamples, "no held-out samples (need at least 5 samples)");
  for (std::size_t i = begin; i < data.samples.size(); ++i) {
    const SamplePair& s = data.samples[i];
    Tensor out = super_resolve(model, s.lr, eval_noise_stream(s.id));
    out.values() = out.values().cwiseMax(-1.0).cwiseMin(1.0);
    r.psnr += psnr(out, s.hr, 2.0);
    r.baseline_psnr += psnr(box_upsample(s.lr, data.scale), s.hr, 2.0);
  }
  r.psnr /= static_cast<double>(r.count);
  r.baseline_psnr /= static_cast<double>(r.count);
  return r;
}

LatentDump collect_latents(const Model& model, const Dataset& data) {
  const auto n = static_cast<Eigen::Index>(data.samples.size());
  const ModelConfig& cfg = model.config;
  LatentDump d{Tensor::zeros({n, cfg.gdm.latent_dim}), Tensor::zeros({n, cfg.gdm.relation_dim()})};
  for (Eigen::Index i = 0; i < n; ++i) {
    Graph graph(&model.params);
    Var z = encode(graph.constant(data.samples[static_cast<std::size_t>(i)].lr), cfg.encoder());
    GdmOutput out = gdm_forward(z, GdmVars::bind(graph, cfg.gdm_mode), cfg.gdm, cfg.gdm_mode);
    d.z.matrix().row(i) = z.value().values().transpose();
    d.g.matrix().row(i) = out.attributes.value().values().transpose();
  }
  return d;
}

std::vector<ModuleCheck> gradcheck_model(Model& model, const SamplePair& sample, double h,
                                         Eigen::Index max_per_tensor) {
  const ModelConfig& cfg = model.config;
  const DiscriminatorFn disc = discriminator_of(cfg);
  const std::uint64_t stream = eval_noise_stream(sample.id);
  auto generator_loss = [&](double beta) -> LossBuilder {
    LossWeights weights{cfg.weights.alpha, beta};
    return [&, weights](Graph& graph) {
      ForwardPass pass = forward(graph, model, sample.lr, stream);
      return total_loss(pass.image, graph.constant(sample.hr), model.perceptual, disc, weights).total;
    };
  };
  const Tensor fake = super_resolve(model, sample.lr, stream);
  const LossBuilder disc_loss = [&](Graph& graph) {
    return discriminator_loss(disc(graph.constant(sample.hr)), disc(graph.constant(fake)));
  };

  std::vector<ModuleCheck> out;
  auto run = [&](const std::string& path, const std::string& module, const LossBuilder& loss) {
    const auto names = names_with_prefix(model.params, module + ".");
    if (names.empty()) return;
    out.push_back({path, module, gradcheck_params(model.params, loss, names, h, max_per_tensor)});
  };
  const double beta = cfg.weights.beta > 0.0 ? cfg.weights.beta : 0.01;
  for (const char* module : {"enc", "gdm", "cgm"}) run("beta0", module, generator_loss(0.0));
  for (const char* module : {"enc", "gdm", "cgm"}) run("adversarial", module, generator_loss(beta));
  run("discriminator", "disc", disc_loss);
  return out;
}

}  // namespace laren
