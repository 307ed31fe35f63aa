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

#include <string>
#include <vector>

#include "laren/autodiff.hpp"
#include "laren/ops.hpp"
#include "laren/rng.hpp"

namespace laren {

/// How the entangled code z becomes the per-layer codes g_1..g_N.
enum class GdmMode {
  kHmrr,    ///< hierarchical multi-relation reasoning (D relations per node pair)
  kVrr,     ///< one scalar relation per node pair, shared by all D attributes
  kAffine,  ///< single linear map z -> g (W-space style baseline)
};

const char* to_string(GdmMode mode);
GdmMode parse_gdm_mode(const std::string& text);

struct GdmConfig {
  Eigen::Index latent_dim = 16;  // H
  Eigen::Index layers = 4;       // N
  Eigen::Index nodes = 8;        // J
  Eigen::Index node_dim = 4;     // C
  Eigen::Index filters = 4;      // K

  /// D = N * H attribute sub-graphs.
  Eigen::Index relation_dim() const { return layers * latent_dim; }
  void validate() const;
};

/// Trainable GDM weights. Node projections are (J*C) x H so that row block i
/// of Wu z is node u_i; with J = 1 this is the plain C x H projection.
struct GdmParams {
  Tensor wu;            // (J*C) x H
  Tensor wv;            // (J*C) x H
  Tensor wattr;         // D x 2C
  Tensor filters;       // K x 3
  Tensor filter_bias;   // K
  Tensor readout;       // C*K
  Tensor readout_bias;  // 1
  Tensor affine_w;      // D x H, kAffine only
  Tensor affine_b;      // D, kAffine only

  /// Projections ~ Normal(0, 1/fan_in), readout |Normal(0, 1/fan_in)|,
  /// biases 0. Only the tensors used by
  /// `mode` are created.
  static GdmParams init(const GdmConfig& config, GdmMode mode, Rng& rng);

  void store(ParameterSet& params, const std::string& prefix = "gdm") const;
};

/// Graph handles for the GDM weights bound from a ParameterSet.
struct GdmVars {
  Var wu, wv, wattr, filters, filter_bias, readout, readout_bias, affine_w, affine_b;

  static GdmVars bind(Graph& g, GdmMode mode, const std::string& prefix = "gdm");
};

struct NodeVars {
  Var u;  // J x C
  Var v;  // J x C
};

NodeVars build_nodes(Var z, const GdmVars& w, const GdmConfig& config);

/// Relation embeddings for a batch of node-pair feature rows [u ; v]
/// (P x 2C): relu(rows Wattr^T), row-normalized, softmax with exact zeros
/// masked. Rows whose norm is <= 1e-12 become uniform and are flagged.
Var hmrr_relations(Var pair_rows, Var wattr, std::vector<bool>* degenerate = nullptr);

/// Scalar relation per ordered pair, softmax over j of U_i . V_j / sqrt(C)
/// scaled by J / D, repeated across all D attributes.
Var vrr_relations(const NodeVars& nodes, Eigen::Index relation_dim);

/// f (length D) from the all-pairs relations. The triplet's relation column is D * r.
Var extract_attributes(const NodeVars& nodes, Var relations, const GdmVars& w);

/// g_n = f[(n-1)H, nH).
std::vector<Var> split_codes(Var f, Eigen::Index layers, Eigen::Index latent_dim);

struct GdmOutput {
  Var attributes;           // f, length D
  std::vector<Var> codes;   // g_1..g_N
};

GdmOutput gdm_forward(Var z, const GdmVars& w, const GdmConfig& config, GdmMode mode);

// Tensor-level entry points.

struct NodeMatrices {
  Tensor u;
  Tensor v;
};

struct RelationEmbedding {
  Tensor r;
  bool degenerate = false;
};

NodeMatrices build_nodes(const Tensor& z, const GdmParams& params, const GdmConfig& config);
RelationEmbedding hmrr_relation(const Tensor& u, const Tensor& v, const Tensor& wattr);
/// All J^2 ordered pairs, row p = i * J + j.
Tensor hmrr_relations(const Tensor& u, const Tensor& v, const Tensor& wattr);
Tensor extract_attributes(const Tensor& u, const Tensor& v, const Tensor& relations, const GdmParams& params);
std::vector<Tensor> split_codes(const Tensor& f, Eigen::Index layers, Eigen::Index latent_dim);
std::vector<Tensor> gdm_forward(const Tensor& z, const GdmParams& params, const GdmConfig& config, GdmMode mode);

}  // namespace laren
