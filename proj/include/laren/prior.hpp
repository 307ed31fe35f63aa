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
#include "laren/ops.hpp"
#include "laren/rng.hpp"
#include "laren/tensor.hpp"

namespace laren {

inline constexpr double kLeakySlope = 0.2;

/// Shape of the frozen progressive generator.
struct GeneratorConfig {
  Eigen::Index layers = 4;       // N
  Eigen::Index latent_dim = 16;  // H, length of g_n
  Eigen::Index code_dim = 8;     // F, length of c_n
  Eigen::Index width = 32;       // channels at 4x4; halved per resolution, floor 8

  /// Spatial size seen by layer n (1-based): 4 * 2^((n-1)/2).
  Eigen::Index layer_resolution(Eigen::Index n) const;
  /// Output channels of layer n.
  Eigen::Index layer_channels(Eigen::Index n) const;
  /// 4 * 2^(ceil(N/2) - 1).
  Eigen::Index output_resolution() const;
  void validate() const;
};

struct GeneratorLayer {
  Eigen::Index resolution = 4;
  bool upsample = false;  // x2 nearest before this layer
  Tensor mod_w;           // 2*Cin x H; rows [0, Cin) scale, [Cin, 2Cin) shift
  Tensor mod_b;           // 2*Cin
  Tensor detail_w;        // res^2 x F
  Tensor gain;            // Cin
  Tensor conv_w;          // Cout x Cin x 3 x 3
  Tensor conv_b;          // Cout
};

/// A seeded, frozen StyleGAN-like ladder. Layer n instance-normalizes its
/// input and modulates it with (1 + scale(g_n), shift(g_n)), adds gain * reshape(detail_w c_n), then
/// applies a 3x3 convolution and leaky ReLU. Two layers per resolution;
/// a 1x1 toRGB without activation produces the image.
struct Generator {
  GeneratorConfig config;
  std::uint64_t seed = 0;
  Tensor input;  // C0 x 4 x 4
  std::vector<GeneratorLayer> layers;
  Tensor rgb_w;  // 3 x C x 1 x 1
  Tensor rgb_b;  // 3

  static Generator create(const GeneratorConfig& config, std::uint64_t seed);
  /// Every weight under a stable name, for checkpoints and frozen checks.
  ParameterSet tensors() const;
};

/// Image 3 x S x S from codes g_1..g_N and detail codes c_1..c_N. Generator
/// weights enter the graph as constants.
Var synthesize(const std::vector<Var>& g, const std::vector<Var>& c, const Generator& gen);
Tensor synthesize(const std::vector<Tensor>& g, const std::vector<Tensor>& c, const Generator& gen);

/// Stride-2 3x3 convolutions (leaky ReLU) down to 1x1, then a linear head.
/// Parameters live in a ParameterSet as `<prefix>.conv<k>.w/.b` and
/// `<prefix>.fc.w/.b`.
struct ConvStackConfig {
  Eigen::Index input_size = 4;  // spatial size of the square input
  Eigen::Index base_width = 16;
  Eigen::Index max_width = 64;
  Eigen::Index outputs = 16;

  /// Number of stride-2 convolutions needed to reach 1x1.
  Eigen::Index depth() const;
  Eigen::Index width(Eigen::Index k) const;
};

/// He-normal convolutions, Normal(0, 1/fan_in) head, zero biases.
void init_conv_stack(const ConvStackConfig& config, const std::string& prefix, Rng& rng, ParameterSet& params);
Var conv_stack(Var image, const ConvStackConfig& config, const std::string& prefix);

ConvStackConfig encoder_config(Eigen::Index lr_size, Eigen::Index latent_dim);
ConvStackConfig discriminator_config(Eigen::Index hr_size);

/// z (length H) from an LR image.
Var encode(Var lr, const ConvStackConfig& config, const std::string& prefix = "enc");
/// Probability in (0, 1): sigmoid of the logit clamped to [-30, 30].
Var discriminate(Var image, const ConvStackConfig& config, const std::string& prefix = "disc");

/// Frozen random feature extractor standing in for a pretrained network:
/// conv 3->8 (stride 1), ReLU, conv 8->8 (stride 2), ReLU.
struct Perceptual {
  Tensor w1, b1, w2, b2;

  static Perceptual create(std::uint64_t seed);
  Var features(Var image) const;
};

}  // namespace laren
