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

#include <functional>
#include <string>
#include <vector>

#include "laren/autodiff.hpp"

namespace laren {

/// Builds a scalar loss on a fresh graph bound to the parameter set under test.
using LossBuilder = std::function<Var(Graph&)>;

struct GradcheckResult {
  double max_rel_error = 0.0;
  Eigen::Index checked = 0;
  /// Coordinates whose +-h evaluations flip a ReLU/leaky/clamp/mask branch.
  Eigen::Index skipped = 0;
  std::string worst_param;
  Eigen::Index worst_index = -1;
};

/// Central-difference check of backward() for the named parameters.
///
/// Relative error per coordinate is |a - n| / max(|a|, |n|, 1e-8) with
/// n = (f(theta + h) - f(theta - h)) / 2h. A coordinate is skipped (and
/// counted) when either perturbed evaluation changes the graph's branch
/// signature, i.e. the step straddles a kink. `max_per_tensor` > 0 checks an
/// evenly strided subset of each tensor.
GradcheckResult gradcheck_params(ParameterSet& params, const LossBuilder& loss, const std::vector<std::string>& names,
                          double h, Eigen::Index max_per_tensor = 0);

inline GradcheckResult gradcheck(ParameterSet& params, const LossBuilder& loss, const std::string& name, double h) {
  return gradcheck_params(params, loss, {name}, h);
}

/// Names in `params` starting with `prefix`.
std::vector<std::string> names_with_prefix(const ParameterSet& params, const std::string& prefix);

}  // namespace laren
