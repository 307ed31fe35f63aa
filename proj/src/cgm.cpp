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

#include "laren/cgm.hpp"

#include <cmath>

namespace laren {

const char* to_string(CgmMode mode) {
  switch (mode) {
    case CgmMode::kReRR: return "ReRR";
    case CgmMode::kVrr: return "VRR";
    case CgmMode::kNoise: return "NOISE";
  }
  return "?";
}

CgmMode parse_cgm_mode(const std::string& text) {
  if (text == "ReRR") return CgmMode::kReRR;
  if (text == "VRR") return CgmMode::kVrr;
  if (text == "NOISE") return CgmMode::kNoise;
  fail(ErrorCode::kBadConfig, "cgm_mode must be ReRR, VRR or NOISE, got '" + text + "'");
}

void CgmConfig::validate() const {
  require(latent_dim > 0 && layers > 0 && code_dim > 0, ErrorCode::kBadConfig, "CGM dimensions must be positive");
}

CgmParams CgmParams::init(const CgmConfig& config, Rng& rng) {
  config.validate();
  const auto H = config.latent_dim, F = config.code_dim;
  const double h_scale = 1.0 / std::sqrt(static_cast<double>(H));
  CgmParams p;
  p.wq = rng_normal(rng, {H, H}, 0.0, h_scale);
  p.wk = rng_normal(rng, {F, H}, 0.0, h_scale);
  for (Eigen::Index m = 1; m < config.layers; ++m) {
    const auto L = config.carried_width(m);
    p.wt.push_back(rng_normal(rng, {F, L}, 0.0, 1.0 / std::sqrt(static_cast<double>(L))));
  }
  return p;
}

void CgmParams::store(ParameterSet& params, const std::string& prefix) const {
  params.set(prefix + ".WQ", wq);
  params.set(prefix + ".WK", wk);
  for (std::size_t m = 0; m < wt.size(); ++m) params.set(prefix + ".Wt" + std::to_string(m + 1), wt[m]);
}

CgmVars CgmVars::bind(Graph& g, const CgmConfig& config, const std::string& prefix) {
  CgmVars w;
  w.wq = g.parameter(prefix + ".WQ");
  w.wk = g.parameter(prefix + ".WK");
  for (Eigen::Index m = 1; m < config.layers; ++m) w.wt.push_back(g.parameter(prefix + ".Wt" + std::to_string(m)));
  return w;
}

Var layer_attention(Var g, const CgmVars& w) {
  const Tensor& code = g.value();
  const Tensor& wq = w.wq.value();
  require(code.rank() == 1 && wq.rank() == 2 && wq.dim(1) == code.size(), ErrorCode::kDimMismatch,
          "code of length " + std::to_string(code.size()) + " does not match WQ " + shape_string(wq.shape()));
  const Eigen::Index H = code.size();
  const Eigen::Index F = w.wk.value().dim(0);
  Var keys = reshape(matmul(w.wk, g), {F, 1});
  Var queries = reshape(matmul(w.wq, g), {1, H});
  return matmul(keys, queries);
}

Var row_normalize(Var m, Eigen::Index latent_dim) {
  return softmax(scale(m, 1.0 / std::sqrt(static_cast<double>(latent_dim))));
}

RelationMatrix recursive_relation(const std::optional<RelationMatrix>& previous, Var g, const CgmVars& w,
                                  Eigen::Index layer) {
  const Eigen::Index H = g.value().size();
  const Eigen::Index F = w.wk.value().dim(0);
  Var attention = layer_attention(g, w);
  if (layer == 1) {
    require(!previous.has_value(), ErrorCode::kWrongLayerShape, "layer 1 takes no previous relation matrix");
    return {row_normalize(attention, H), 1};
  }
  require(layer >= 2 && previous.has_value(), ErrorCode::kWrongLayerShape,
          "layer " + std::to_string(layer) + " needs the relation matrix of layer " + std::to_string(layer - 1));
  require(previous->layer == layer - 1, ErrorCode::kWrongLayerShape,
          "previous relation matrix belongs to layer " + std::to_string(previous->layer));
  require(static_cast<std::size_t>(layer - 1) <= w.wt.size(), ErrorCode::kWrongLayerShape,
          "no carry weights for layer " + std::to_string(layer));
  const Eigen::Index expected_width = layer == 2 ? H : H + F;
  const Tensor& t_prev = previous->t.value();
  require(t_prev.rank() == 2 && t_prev.dim(0) == F && t_prev.dim(1) == expected_width, ErrorCode::kWrongLayerShape,
          "T^" + std::to_string(layer - 1) + " has shape " + shape_string(t_prev.shape()));
  Var carry_weights = w.wt[static_cast<std::size_t>(layer - 2)];
  require(carry_weights.value().shape() == Shape({F, expected_width}), ErrorCode::kWrongLayerShape,
          "Wt^" + std::to_string(layer - 1) + " has shape " + shape_string(carry_weights.value().shape()));
  Var carried = matmul(previous->t, transpose(carry_weights));  // F x F
  return {row_normalize(concat(carried, attention, 1), H), layer};
}

Var generate_code(const RelationMatrix& t, std::optional<Var> previous_code, Var g) {
  const Tensor& tm = t.t.value();
  if (t.layer == 1) {
    require(!previous_code.has_value(), ErrorCode::kDimMismatch, "layer 1 takes no previous code");
    require(tm.dim(1) == g.value().size(), ErrorCode::kDimMismatch, "T^1 must be F x H");
    return relu(matmul(t.t, g));
  }
  require(previous_code.has_value(), ErrorCode::kDimMismatch, "layer " + std::to_string(t.layer) + " needs c_{n-1}");
  require(tm.dim(1) == previous_code->value().size() + g.value().size(), ErrorCode::kDimMismatch,
          "T^n must be F x (F+H)");
  return relu(matmul(t.t, concat(*previous_code, g, 0)));
}

std::vector<Var> cgm_forward(const std::vector<Var>& codes, const CgmVars& w, const CgmConfig& config, CgmMode mode,
                             std::vector<RelationMatrix>* relations) {
  config.validate();
  require(static_cast<Eigen::Index>(codes.size()) == config.layers, ErrorCode::kDimMismatch,
          "expected " + std::to_string(config.layers) + " disentangled codes");
  require(mode != CgmMode::kNoise, ErrorCode::kBadConfig, "NOISE mode generates no codes");
  std::vector<Var> out;
  std::optional<RelationMatrix> previous;
  for (Eigen::Index n = 1; n <= config.layers; ++n) {
    Var g = codes[static_cast<std::size_t>(n - 1)];
    RelationMatrix t;
    if (mode == CgmMode::kVrr || n == 1) {
      t = {row_normalize(layer_attention(g, w), config.latent_dim), 1};
      out.push_back(generate_code(t, std::nullopt, g));
      t.layer = n;
    } else {
      t = recursive_relation(previous, g, w, n);
      out.push_back(generate_code(t, out.back(), g));
    }
    if (relations) relations->push_back(t);
    previous = t;
  }
  return out;
}

namespace {

ParameterSet as_set(const CgmParams& params) {
  ParameterSet set;
  params.store(set);
  return set;
}

}  // namespace

Tensor layer_attention(const Tensor& g, const CgmParams& params) {
  Graph graph;
  CgmVars w;
  w.wq = graph.constant(params.wq);
  w.wk = graph.constant(params.wk);
  return layer_attention(graph.constant(g), w).value();
}

std::vector<Tensor> cgm_forward(const std::vector<Tensor>& codes, const CgmParams& params, const CgmConfig& config,
                                CgmMode mode, std::vector<Tensor>* relations) {
  ParameterSet set = as_set(params);
  Graph g(&set);
  CgmVars w = CgmVars::bind(g, config);
  std::vector<Var> inputs;
  for (const auto& c : codes) inputs.push_back(g.constant(c));
  std::vector<RelationMatrix> ts;
  std::vector<Tensor> out;
  for (Var c : cgm_forward(inputs, w, config, mode, &ts)) out.push_back(c.value());
  if (relations) {
    for (const auto& t : ts) relations->push_back(t.t.value());
  }
  return out;
}

}  // namespace laren
