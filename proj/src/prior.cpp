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

#include "laren/prior.hpp"

#include <algorithm>
#include <cmath>

#include "laren/error.hpp"

namespace laren {

namespace {

Tensor he_normal(Rng& rng, Shape shape, Eigen::Index fan_in) {
  return rng_normal(rng, std::move(shape), 0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
}

Tensor lecun_normal(Rng& rng, Shape shape, Eigen::Index fan_in) {
  return rng_normal(rng, std::move(shape), 0.0, std::sqrt(1.0 / static_cast<double>(fan_in)));
}

Var linear(Var w, Var b, Var x) { return matmul(w, x) + b; }

}  // namespace

Eigen::Index GeneratorConfig::layer_resolution(Eigen::Index n) const { return Eigen::Index{4} << ((n - 1) / 2); }

Eigen::Index GeneratorConfig::layer_channels(Eigen::Index n) const {
  return std::max<Eigen::Index>(8, width >> ((n - 1) / 2));
}

Eigen::Index GeneratorConfig::output_resolution() const { return layer_resolution(layers); }

void GeneratorConfig::validate() const {
  require(layers >= 1 && latent_dim >= 1 && code_dim >= 1 && width >= 1, ErrorCode::kBadConfig,
          "generator dimensions must be positive");
  require(layers <= 16, ErrorCode::kBadConfig, "generator supports at most 16 layers");
}

Generator Generator::create(const GeneratorConfig& config, std::uint64_t seed) {
  config.validate();
  Generator gen;
  gen.config = config;
  gen.seed = seed;
  Rng rng(seed, streams::kGenerator);
  Eigen::Index in_channels = config.layer_channels(1);
  gen.input = rng_normal(rng, {in_channels, 4, 4});
  for (Eigen::Index n = 1; n <= config.layers; ++n) {
    GeneratorLayer layer;
    layer.resolution = config.layer_resolution(n);
    layer.upsample = n > 1 && layer.resolution != config.layer_resolution(n - 1);
    const Eigen::Index out_channels = config.layer_channels(n);
    layer.mod_w = lecun_normal(rng, {2 * in_channels, config.latent_dim}, config.latent_dim);
    layer.mod_b = Tensor::zeros({2 * in_channels});
    layer.detail_w = lecun_normal(rng, {layer.resolution * layer.resolution, config.code_dim}, config.code_dim);
    layer.gain = rng_normal(rng, {in_channels});
    layer.conv_w = he_normal(rng, {out_channels, in_channels, 3, 3}, in_channels * 9);
    layer.conv_b = Tensor::zeros({out_channels});
    gen.layers.push_back(std::move(layer));
    in_channels = out_channels;
  }
  gen.rgb_w = lecun_normal(rng, {3, in_channels, 1, 1}, in_channels);
  gen.rgb_b = Tensor::zeros({3});
  return gen;
}

ParameterSet Generator::tensors() const {
  ParameterSet out;
  out.set("gen.input", input);
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::string p = "gen.layer" + std::to_string(i + 1) + ".";
    const GeneratorLayer& l = layers[i];
    out.set(p + "mod_w", l.mod_w);
    out.set(p + "mod_b", l.mod_b);
    out.set(p + "detail_w", l.detail_w);
    out.set(p + "gain", l.gain);
    out.set(p + "conv_w", l.conv_w);
    out.set(p + "conv_b", l.conv_b);
  }
  out.set("gen.rgb_w", rgb_w);
  out.set("gen.rgb_b", rgb_b);
  return out;
}

Var synthesize(const std::vector<Var>& g, const std::vector<Var>& c, const Generator& gen) {
  const GeneratorConfig& cfg = gen.config;
  require(static_cast<Eigen::Index>(g.size()) == cfg.layers && static_cast<Eigen::Index>(c.size()) == cfg.layers,
          ErrorCode::kDimMismatch,
          "synthesize needs " + std::to_string(cfg.layers) + " codes g and c, got " + std::to_string(g.size()) +
              " and " + std::to_string(c.size()));
  Graph& graph = g.front().graph();
  Var x = graph.constant(gen.input);
  for (std::size_t i = 0; i < gen.layers.size(); ++i) {
    const GeneratorLayer& l = gen.layers[i];
    require(g[i].value().rank() == 1 && g[i].value().size() == cfg.latent_dim, ErrorCode::kDimMismatch,
            "g_" + std::to_string(i + 1) + " must have length " + std::to_string(cfg.latent_dim));
    require(c[i].value().rank() == 1 && c[i].value().size() == cfg.code_dim, ErrorCode::kDimMismatch,
            "c_" + std::to_string(i + 1) + " must have length " + std::to_string(cfg.code_dim));
    if (l.upsample) x = upsample_nearest(x, 2);
    const Eigen::Index channels = l.gain.size();
    Var style = linear(graph.constant(l.mod_w), graph.constant(l.mod_b), g[i]);
    x = modulate(instance_norm(x), add_scalar(slice(style, 0, 0, channels), 1.0), slice(style, 0, channels, 2 * channels));
    Var detail = reshape(matmul(graph.constant(l.detail_w), c[i]), {l.resolution, l.resolution});
    x = add_channel_map(x, detail, graph.constant(l.gain));
    x = leaky_relu(conv2d(x, graph.constant(l.conv_w), graph.constant(l.conv_b), 1, 1), kLeakySlope);
  }
  return conv2d(x, graph.constant(gen.rgb_w), graph.constant(gen.rgb_b), 1, 0);
}

Tensor synthesize(const std::vector<Tensor>& g, const std::vector<Tensor>& c, const Generator& gen) {
  Graph graph;
  std::vector<Var> gv, cv;
  for (const auto& t : g) gv.push_back(graph.constant(t));
  for (const auto& t : c) cv.push_back(graph.constant(t));
  require(!gv.empty(), ErrorCode::kDimMismatch, "synthesize needs at least one code");
  return synthesize(gv, cv, gen).value();
}

Eigen::Index ConvStackConfig::depth() const {
  Eigen::Index k = 0;
  for (Eigen::Index size = input_size; size > 1; size = (size + 1) / 2) ++k;
  return k;
}

Eigen::Index ConvStackConfig::width(Eigen::Index k) const {
  return std::min(max_width, base_width << std::min<Eigen::Index>(k, 20));
}

void init_conv_stack(const ConvStackConfig& config, const std::string& prefix, Rng& rng, ParameterSet& params) {
  Eigen::Index channels = 3;
  for (Eigen::Index k = 0; k < config.depth(); ++k) {
    const std::string p = prefix + ".conv" + std::to_string(k);
    params.set(p + ".w", he_normal(rng, {config.width(k), channels, 3, 3}, channels * 9));
    params.set(p + ".b", Tensor::zeros({config.width(k)}));
    channels = config.width(k);
  }
  params.set(prefix + ".fc.w", lecun_normal(rng, {config.outputs, channels}, channels));
  params.set(prefix + ".fc.b", Tensor::zeros({config.outputs}));
}

Var conv_stack(Var image, const ConvStackConfig& config, const std::string& prefix) {
  const Tensor& x = image.value();
  require(x.rank() == 3 && x.dim(0) == 3 && x.dim(1) == config.input_size && x.dim(2) == config.input_size,
          ErrorCode::kDimMismatch,
          prefix + ": expected a 3 x " + std::to_string(config.input_size) + " x " + std::to_string(config.input_size) +
              " image, got " + shape_string(x.shape()));
  Graph& g = image.graph();
  Var h = image;
  for (Eigen::Index k = 0; k < config.depth(); ++k) {
    const std::string p = prefix + ".conv" + std::to_string(k);
    h = leaky_relu(conv2d(h, g.parameter(p + ".w"), g.parameter(p + ".b"), 2, 1), kLeakySlope);
  }
  const Eigen::Index channels = h.value().dim(0);
  return linear(g.parameter(prefix + ".fc.w"), g.parameter(prefix + ".fc.b"), reshape(h, {channels}));
}

ConvStackConfig encoder_config(Eigen::Index lr_size, Eigen::Index latent_dim) {
  return ConvStackConfig{lr_size, 16, 64, latent_dim};
}

ConvStackConfig discriminator_config(Eigen::Index hr_size) { return ConvStackConfig{hr_size, 8, 32, 1}; }

Var encode(Var lr, const ConvStackConfig& config, const std::string& prefix) {
  return conv_stack(lr, config, prefix);
}

Var discriminate(Var image, const ConvStackConfig& config, const std::string& prefix) {
  return sigmoid(clamp(conv_stack(image, config, prefix), -30.0, 30.0));
}

Perceptual Perceptual::create(std::uint64_t seed) {
  Rng rng(seed, streams::kPerceptual);
  Perceptual p;
  p.w1 = he_normal(rng, {8, 3, 3, 3}, 27);
  p.b1 = Tensor::zeros({8});
  p.w2 = he_normal(rng, {8, 8, 3, 3}, 72);
  p.b2 = Tensor::zeros({8});
  return p;
}

Var Perceptual::features(Var image) const {
  Graph& g = image.graph();
  Var h = relu(conv2d(image, g.constant(w1), g.constant(b1), 1, 1));
  return relu(conv2d(h, g.constant(w2), g.constant(b2), 2, 1));
}

}  // namespace laren
