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

#include <optional>
#include <string>
#include <vector>

#include "laren/autodiff.hpp"
#include "laren/ops.hpp"
#include "laren/rng.hpp"

namespace laren {

/// Source of the per-layer detail codes fed to the generator.
enum class CgmMode {
  kReRR,   ///< recursive relation reasoning, layer n conditioned on layer n-1
  kVrr,    ///< independent per-layer relations
  kNoise,  ///< seeded Gaussian noise instead of generated codes
};

const char* to_string(CgmMode mode);
CgmMode parse_cgm_mode(const std::string& text);

struct CgmConfig {
  Eigen::Index latent_dim = 16;  // H
  Eigen::Index layers = 4;       // N
  Eigen::Index code_dim = 8;     // F

  /// Column count L of Wt^m (m = 1..N-1): H for m = 1, H + F otherwise.
  Eigen::Index carried_width(Eigen::Index m) const { return m == 1 ? latent_dim : latent_dim + code_dim; }
  void validate() const;
};

struct CgmParams {
  Tensor wq;               // H x H
  Tensor wk;               // F x H
  std::vector<Tensor> wt;  // wt[m-1] = Wt^m, F x L(m), m = 1..N-1

  /// Normal(0, 1/fan_in) for every matrix.
  static CgmParams init(const CgmConfig& config, Rng& rng);
  void store(ParameterSet& params, const std::string& prefix = "cgm") const;
};

struct CgmVars {
  Var wq, wk;
  std::vector<Var> wt;

  static CgmVars bind(Graph& g, const CgmConfig& config, const std::string& prefix = "cgm");
};

/// Relation matrix T^n with its layer index (1-based).
struct RelationMatrix {
  Var t;
  Eigen::Index layer = 0;
};

/// (WK g)(WQ g)^T, F x H.
Var layer_attention(Var g, const CgmVars& w);

/// Row-wise softmax of m / sqrt(H).
Var row_normalize(Var m, Eigen::Index latent_dim);

/// T^1 = rownorm(A^1); T^n = rownorm([T^{n-1} (Wt^{n-1})^T | A^n]) for n >= 2.
RelationMatrix recursive_relation(const std::optional<RelationMatrix>& previous, Var g, const CgmVars& w,
                                  Eigen::Index layer);

/// c_1 = relu(T^1 g_1); c_n = relu(T^n [c_{n-1} ; g_n]).
Var generate_code(const RelationMatrix& t, std::optional<Var> previous_code, Var g);

/// Codes c_1..c_N. kNoise is not handled here; the caller supplies noise.
std::vector<Var> cgm_forward(const std::vector<Var>& codes, const CgmVars& w, const CgmConfig& config, CgmMode mode,
                             std::vector<RelationMatrix>* relations = nullptr);

// Tensor-level entry points.
Tensor layer_attention(const Tensor& g, const CgmParams& params);
std::vector<Tensor> cgm_forward(const std::vector<Tensor>& codes, const CgmParams& params, const CgmConfig& config,
                                CgmMode mode, std::vector<Tensor>* relations = nullptr);

}  // namespace laren
