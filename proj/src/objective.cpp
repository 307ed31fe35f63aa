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

#include "laren/objective.hpp"

#include <cmath>
#include <limits>

#include "laren/error.hpp"
#include "laren/ops.hpp"

namespace laren {

namespace {

Var floored_log(Var x) { return log(clamp(x, kLogFloor, std::numeric_limits<double>::max())); }

Var one_minus(Var x) { return add_scalar(scale(x, -1.0), 1.0); }

}  // namespace

LossTerms total_loss(Var y_hat, Var y, const Perceptual& phi, const DiscriminatorFn& discriminator,
                     const LossWeights& weights) {
  require(y_hat.shape() == y.shape(), ErrorCode::kDimMismatch,
          "loss: prediction " + shape_string(y_hat.shape()) + " vs target " + shape_string(y.shape()));
  Graph& g = y_hat.graph();
  LossTerms terms;
  terms.mse = mean(square(y_hat - y));
  terms.perceptual = mean(square(phi.features(y_hat) - phi.features(y)));
  terms.total = terms.mse + scale(terms.perceptual, weights.alpha);
  if (weights.beta != 0.0) {
    require(static_cast<bool>(discriminator), ErrorCode::kBadConfig, "adversarial weight set without a discriminator");
    terms.adversarial = floored_log(one_minus(discriminator(y_hat)));
    terms.total = terms.total + scale(terms.adversarial, weights.beta);
  } else {
    terms.adversarial = g.constant(Tensor::scalar(0.0));
  }
  return terms;
}

Var discriminator_loss(Var real_prob, Var fake_prob) {
  return scale(floored_log(real_prob) + floored_log(one_minus(fake_prob)), -1.0);
}

void adam_step(ParameterSet& params, const GradientMap& grads, AdamState& state,
               const std::vector<std::string>& names) {
  const AdamConfig& c = state.config;
  const double t = static_cast<double>(state.step + 1);
  const double correct1 = 1.0 - std::pow(c.beta1, t);
  const double correct2 = 1.0 - std::pow(c.beta2, t);
  for (const auto& name : names) {
    Tensor& theta = params.at(name);
    auto it = grads.find(name);
    require(it != grads.end(), ErrorCode::kShapeMismatch, "adam: no gradient for " + name);
    const Tensor& grad = it->second;
    require(grad.shape() == theta.shape(), ErrorCode::kShapeMismatch,
            "adam: gradient " + shape_string(grad.shape()) + " for parameter " + name + " " +
                shape_string(theta.shape()));
    if (!state.m.contains(name)) {
      state.m.set(name, Tensor::zeros(theta.shape()));
      state.v.set(name, Tensor::zeros(theta.shape()));
    }
    Tensor& m = state.m.at(name);
    Tensor& v = state.v.at(name);
    require(m.shape() == theta.shape() && v.shape() == theta.shape(), ErrorCode::kShapeMismatch,
            "adam: moment shape mismatch for " + name);
    m.values() = c.beta1 * m.values() + (1.0 - c.beta1) * grad.values();
    v.values() = c.beta2 * v.values() + (1.0 - c.beta2) * grad.values().cwiseAbs2();
    theta.values().array() -=
        c.lr * (m.values().array() / correct1) / ((v.values().array() / correct2).sqrt() + c.eps);
  }
  ++state.step;
}

}  // namespace laren
