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
#include <functional>
#include <string>
#include <vector>

#include "laren/autodiff.hpp"
#include "laren/prior.hpp"

namespace laren {

inline constexpr double kLogFloor = 1e-12;

struct LossWeights {
  double alpha = 0.01;  // perceptual
  double beta = 0.01;   // adversarial
};

/// Loss components; `adversarial` is the unweighted log(1 - D(y_hat)).
struct LossTerms {
  Var total;
  Var mse;
  Var perceptual;
  Var adversarial;
};

using DiscriminatorFn = std::function<Var(Var)>;

/// mean((y_hat - y)^2) + alpha * mean((phi(y_hat) - phi(y))^2)
///   + beta * log(max(1 - D(y_hat), 1e-12)).
/// With beta = 0 the discriminator is not evaluated and may be empty.
LossTerms total_loss(Var y_hat, Var y, const Perceptual& phi, const DiscriminatorFn& discriminator,
                     const LossWeights& weights);

/// -log D(y) - log(1 - D(y_hat)), both arguments floored at 1e-12.
Var discriminator_loss(Var real_prob, Var fake_prob);

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Per-parameter moments, created lazily as zeros on first update.
struct AdamState {
  AdamConfig config;
  std::int64_t step = 0;
  ParameterSet m;
  ParameterSet v;
};

/// One bias-corrected Adam update of the named parameters.
void adam_step(ParameterSet& params, const GradientMap& grads, AdamState& state,
               const std::vector<std::string>& names);

}  // namespace laren
