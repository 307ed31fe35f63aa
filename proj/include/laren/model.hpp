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
#include <string>
#include <vector>

#include "laren/autodiff.hpp"
#include "laren/cgm.hpp"
#include "laren/gdm.hpp"
#include "laren/gradcheck.hpp"
#include "laren/objective.hpp"
#include "laren/prior.hpp"
#include "laren/synthdata.hpp"

namespace laren {

/// Everything that fixes the network and its optimisation.
struct ModelConfig {
  GdmConfig gdm;                 // H, N, J, C, K
  Eigen::Index code_dim = 8;     // F
  Eigen::Index hr_size = 8;      // S
  Eigen::Index scale = 2;        // s
  Eigen::Index gen_width = 32;
  GdmMode gdm_mode = GdmMode::kHmrr;
  CgmMode cgm_mode = CgmMode::kReRR;
  LossWeights weights;
  AdamConfig adam;
  std::uint64_t seed = 1;

  Eigen::Index lr_size() const { return hr_size / scale; }
  CgmConfig cgm() const { return {gdm.latent_dim, gdm.layers, code_dim}; }
  GeneratorConfig generator() const { return {gdm.layers, gdm.latent_dim, code_dim, gen_width}; }
  ConvStackConfig encoder() const { return encoder_config(lr_size(), gdm.latent_dim); }
  ConvStackConfig discriminator() const { return discriminator_config(hr_size); }
  /// Module preconditions plus generator output size == S.
  void validate() const;
};

/// Trainable tensors live in `params` under the prefixes enc., gdm., cgm.
/// and disc.; the generator and perceptual network are frozen and rebuilt
/// from the seed.
struct Model {
  ModelConfig config;
  Generator generator;
  Perceptual perceptual;
  ParameterSet params;
  AdamState opt;       // encoder, GDM, CGM
  AdamState disc_opt;  // discriminator
  std::int64_t step = 0;

  static Model create(const ModelConfig& config);
  std::vector<std::string> generator_side_names() const;
  std::vector<std::string> discriminator_names() const;
};

struct ForwardPass {
  Var z;
  std::vector<Var> g;
  std::vector<Var> c;
  Var image;
};

/// Stream for NOISE-mode codes of batch slot `slot` at training step `step`.
std::uint64_t train_noise_stream(std::int64_t step, std::size_t slot);
/// Stream for NOISE-mode codes when evaluating sample `id`.
std::uint64_t eval_noise_stream(std::uint64_t id);
/// N codes of length F drawn from Normal(0, 1).
std::vector<Tensor> noise_codes(const ModelConfig& config, std::uint64_t stream);

/// LR image -> z -> g -> c (or noise) -> image, on a graph bound to model.params.
ForwardPass forward(Graph& graph, const Model& model, const Tensor& lr, std::uint64_t noise_stream);

/// Super-resolved image for one LR input, as a plain tensor.
Tensor super_resolve(const Model& model, const Tensor& lr, std::uint64_t noise_stream);

struct StepMetrics {
  std::int64_t step = 0;
  double l_mse = 0.0;
  double l_per = 0.0;
  double l_adv = 0.0;
  double total = 0.0;
  double psnr = 0.0;
  double grad_norm = 0.0;
  double disc_loss = 0.0;
};

/// One generator-side Adam step on total_loss (mean over the batch), then,
/// when beta > 0, one discriminator step on -log D(y) - log(1 - D(y_hat)).
/// Metrics describe the batch before the update. Throws NonFiniteLoss.
StepMetrics train_step(Model& model, const std::vector<const SamplePair*>& batch);

/// Batch indices for a step: uniform draws over the training split from
/// Rng(seed, kBatch + step).
std::vector<std::size_t> batch_indices(std::uint64_t seed, std::int64_t step, std::size_t batch, std::size_t pool);

struct EvalResult {
  double psnr = 0.0;           // mean over held-out samples, output clamped to [-1, 1]
  double baseline_psnr = 0.0;  // nearest (box) upsampling of the LR input
  std::size_t count = 0;
};

/// PSNR with peak 2 (images live in [-1, 1]) over the held-out split.
EvalResult evaluate(const Model& model, const Dataset& data);

/// Nearest-neighbour upsampling by an integer factor.
Tensor box_upsample(const Tensor& lr, Eigen::Index factor);

struct LatentDump {
  Tensor z;  // samples x H
  Tensor g;  // samples x N*H
};
LatentDump collect_latents(const Model& model, const Dataset& data);

struct ModuleCheck {
  std::string path;    // beta0, adversarial or discriminator
  std::string module;  // enc, gdm, cgm or disc
  GradcheckResult result;
};

/// Central-difference checks on one sample: total_loss with beta = 0 and
/// with beta > 0 (the configured beta, or 0.01 when it is 0) against every
/// enc./gdm./cgm. tensor, and the discriminator loss against disc.
/// `max_per_tensor` > 0 checks a strided subset of each tensor.
std::vector<ModuleCheck> gradcheck_model(Model& model, const SamplePair& sample, double h,
                                         Eigen::Index max_per_tensor);

}  // namespace laren
