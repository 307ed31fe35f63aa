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

#include "laren/gdm.hpp"

#include <cmath>

namespace laren {

const char* to_string(GdmMode mode) {
  switch (mode) {
    case GdmMode::kHmrr: return "HMRR";
    case GdmMode::kVrr: return "VRR";
    case GdmMode::kAffine: return "AFFINE";
  }
  return "?";
}

GdmMode parse_gdm_mode(const std::string& text) {
  if (text == "HMRR") return GdmMode::kHmrr;
  if (text == "VRR") return GdmMode::kVrr;
  if (text == "AFFINE") return GdmMode::kAffine;
  fail(ErrorCode::kBadConfig, "gdm_mode must be HMRR, VRR or AFFINE, got '" + text + "'");
}

void GdmConfig::validate() const {
  require(latent_dim > 0 && layers > 0 && nodes > 0 && node_dim > 0 && filters > 0, ErrorCode::kBadConfig,
          "GDM dimensions must be positive");
  require(nodes * node_dim >= 2, ErrorCode::kBadConfig, "GDM needs J*C >= 2");
}

namespace {

Tensor projection(Rng& rng, Shape shape, Eigen::Index fan_in) {
  return rng_normal(rng, std::move(shape), 0.0, 1.0 / std::sqrt(static_cast<double>(fan_in)));
}

}  // namespace

GdmParams GdmParams::init(const GdmConfig& config, GdmMode mode, Rng& rng) {
  config.validate();
  const auto H = config.latent_dim, J = config.nodes, C = config.node_dim, K = config.filters;
  const auto D = config.relation_dim();
  GdmParams p;
  if (mode == GdmMode::kAffine) {
    p.affine_w = projection(rng, {D, H}, H);
    p.affine_b = Tensor::zeros({D});
    return p;
  }
  p.wu = projection(rng, {J * C, H}, H);
  p.wv = projection(rng, {J * C, H}, H);
  if (mode == GdmMode::kHmrr) p.wattr = projection(rng, {D, 2 * C}, 2 * C);
  p.filters = projection(rng, {K, 3}, 3);
  p.filter_bias = Tensor::zeros({K});
  // Half-normal readout: a signed readout leaves the final ReLU dead for every
  // attribute on about half of all seeds, since the D scores share their sign.
  p.readout = projection(rng, {C * K}, C * K);
  p.readout.values() = p.readout.values().cwiseAbs();
  p.readout_bias = Tensor::zeros({1});
  return p;
}

void GdmParams::store(ParameterSet& params, const std::string& prefix) const {
  auto put = [&](const char* name, const Tensor& t) {
    if (!t.empty()) params.set(prefix + "." + name, t);
  };
  put("Wu", wu);
  put("Wv", wv);
  put("Wattr", wattr);
  put("filters", filters);
  put("filter_bias", filter_bias);
  put("readout", readout);
  put("readout_bias", readout_bias);
  put("affine_W", affine_w);
  put("affine_b", affine_b);
}

GdmVars GdmVars::bind(Graph& g, GdmMode mode, const std::string& prefix) {
  GdmVars w;
  auto get = [&](const char* name) { return g.parameter(prefix + "." + name); };
  if (mode == GdmMode::kAffine) {
    w.affine_w = get("affine_W");
    w.affine_b = get("affine_b");
    return w;
  }
  w.wu = get("Wu");
  w.wv = get("Wv");
  if (mode == GdmMode::kHmrr) w.wattr = get("Wattr");
  w.filters = get("filters");
  w.filter_bias = get("filter_bias");
  w.readout = get("readout");
  w.readout_bias = get("readout_bias");
  return w;
}

NodeVars build_nodes(Var z, const GdmVars& w, const GdmConfig& config) {
  require(z.value().rank() == 1 && z.value().size() == config.latent_dim, ErrorCode::kDimMismatch,
          "latent code must have length H = " + std::to_string(config.latent_dim));
  const Shape node_shape{config.nodes, config.node_dim};
  return {reshape(matmul(w.wu, z), node_shape), reshape(matmul(w.wv, z), node_shape)};
}

Var hmrr_relations(Var pair_rows, Var wattr, std::vector<bool>* degenerate) {
  const Tensor& rows = pair_rows.value();
  require(rows.rank() == 2 && wattr.value().rank() == 2 && rows.dim(1) == wattr.value().dim(1), ErrorCode::kDimMismatch,
          "pair features " + shape_string(rows.shape()) + " incompatible with Wattr " +
              shape_string(wattr.value().shape()));
  Var pre = relu(matmul(pair_rows, transpose(wattr)));
  std::vector<bool> flat_rows;
  Var unit = l2_normalize(pre, &flat_rows);
  const Tensor& p = pre.value();
  const Eigen::Index cols = p.dim(1);
  Mask mask(static_cast<std::size_t>(p.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    mask[static_cast<std::size_t>(i)] = flat_rows[static_cast<std::size_t>(i / cols)] || p[i] == 0.0;
  }
  if (degenerate) *degenerate = std::move(flat_rows);
  return softmax(unit, mask);
}

Var vrr_relations(const NodeVars& nodes, Eigen::Index relation_dim) {
  const Eigen::Index J = nodes.u.value().dim(0);
  const double temperature = std::sqrt(static_cast<double>(nodes.u.value().dim(1)));
  Var logits = scale(matmul(nodes.u, transpose(nodes.v)), 1.0 / temperature);
  // Rescaled so a uniform row (1/J) maps to 1/D, the uniform HMRR value the extractor expects.
  Var r = scale(softmax(logits), static_cast<double>(J) / static_cast<double>(relation_dim));
  return repeat_columns(reshape(r, {J * J}), relation_dim);
}

Var extract_attributes(const NodeVars& nodes, Var relations, const GdmVars& w) {
  // Relations enter the triplet relative to uniform (D * r), otherwise every attribute sees r ~ 1/D
  // and the D outputs collapse onto one value.
  const auto D = static_cast<double>(relations.value().cols());
  return convkb_extract(nodes.u, nodes.v, scale(relations, D), w.filters, w.filter_bias, w.readout, w.readout_bias);
}

std::vector<Var> split_codes(Var f, Eigen::Index layers, Eigen::Index latent_dim) {
  require(f.value().rank() == 1 && f.value().size() == layers * latent_dim, ErrorCode::kDimMismatch,
          "cannot split " + std::to_string(f.value().size()) + " attributes into " + std::to_string(layers) +
              " codes of length " + std::to_string(latent_dim));
  std::vector<Var> codes;
  for (Eigen::Index n = 0; n < layers; ++n) codes.push_back(slice(f, 0, n * latent_dim, (n + 1) * latent_dim));
  return codes;
}

GdmOutput gdm_forward(Var z, const GdmVars& w, const GdmConfig& config, GdmMode mode) {
  config.validate();
  Var f;
  if (mode == GdmMode::kAffine) {
    require(z.value().rank() == 1 && z.value().size() == config.latent_dim, ErrorCode::kDimMismatch,
            "latent code must have length H");
    f = matmul(w.affine_w, z) + w.affine_b;
  } else {
    NodeVars nodes = build_nodes(z, w, config);
    Var relations = mode == GdmMode::kHmrr ? hmrr_relations(pair_features(nodes.u, nodes.v), w.wattr)
                                           : vrr_relations(nodes, config.relation_dim());
    f = extract_attributes(nodes, relations, w);
  }
  return {f, split_codes(f, config.layers, config.latent_dim)};
}

namespace {

ParameterSet as_set(const GdmParams& params) {
  ParameterSet set;
  params.store(set);
  return set;
}

}  // namespace

NodeMatrices build_nodes(const Tensor& z, const GdmParams& params, const GdmConfig& config) {
  Graph g;
  GdmVars w;
  w.wu = g.constant(params.wu);
  w.wv = g.constant(params.wv);
  NodeVars nodes = build_nodes(g.constant(z), w, config);
  return {nodes.u.value(), nodes.v.value()};
}

RelationEmbedding hmrr_relation(const Tensor& u, const Tensor& v, const Tensor& wattr) {
  require(u.rank() == 1 && u.shape() == v.shape(), ErrorCode::kDimMismatch, "u and v must be C-vectors");
  require(wattr.rank() == 2 && wattr.dim(1) == 2 * u.size(), ErrorCode::kDimMismatch, "Wattr must be D x 2C");
  Graph g;
  Var row = reshape(concat(g.constant(u), g.constant(v), 0), {1, 2 * u.size()});
  std::vector<bool> flat;
  Var r = hmrr_relations(row, g.constant(wattr), &flat);
  return {r.value().reshaped({wattr.dim(0)}), flat[0]};
}

Tensor hmrr_relations(const Tensor& u, const Tensor& v, const Tensor& wattr) {
  Graph g;
  return hmrr_relations(pair_features(g.constant(u), g.constant(v)), g.constant(wattr)).value();
}

Tensor extract_attributes(const Tensor& u, const Tensor& v, const Tensor& relations, const GdmParams& params) {
  Graph g;
  GdmVars w;
  w.filters = g.constant(params.filters);
  w.filter_bias = g.constant(params.filter_bias);
  w.readout = g.constant(params.readout);
  w.readout_bias = g.constant(params.readout_bias);
  return extract_attributes(NodeVars{g.constant(u), g.constant(v)}, g.constant(relations), w).value();
}

std::vector<Tensor> split_codes(const Tensor& f, Eigen::Index layers, Eigen::Index latent_dim) {
  Graph g;
  std::vector<Tensor> out;
  for (Var c : split_codes(g.constant(f), layers, latent_dim)) out.push_back(c.value());
  return out;
}

std::vector<Tensor> gdm_forward(const Tensor& z, const GdmParams& params, const GdmConfig& config, GdmMode mode) {
  ParameterSet set = as_set(params);
  Graph g(&set);
  GdmOutput out = gdm_forward(g.constant(z), GdmVars::bind(g, mode), config, mode);
  std::vector<Tensor> codes;
  for (Var c : out.codes) codes.push_back(c.value());
  return codes;
}

}  // namespace laren
