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

#include "laren/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace laren {

GradcheckResult gradcheck_params(ParameterSet& params, const LossBuilder& loss, const std::vector<std::string>& names,
                          double h, Eigen::Index max_per_tensor) {
  require(h > 0.0, ErrorCode::kBadConfig, "gradcheck step must be positive");
  GradientMap analytic;
  std::uint64_t signature = 0;
  {
    Graph g(&params);
    Var l = loss(g);
    signature = g.branch_signature();
    analytic = g.backward(l);
  }
  auto evaluate = [&](std::uint64_t& sig) {
    Graph g(&params);
    Var l = loss(g);
    require(l.value().is_scalar(), ErrorCode::kNonScalarLoss, "gradcheck loss is not scalar");
    sig = g.branch_signature();
    return l.value()[0];
  };

  GradcheckResult result;
  for (const auto& name : names) {
    Tensor& theta = params.at(name);
    const Tensor& grad = analytic.at(name);
    const Eigen::Index n = theta.size();
    const Eigen::Index stride = (max_per_tensor > 0 && n > max_per_tensor) ? (n + max_per_tensor - 1) / max_per_tensor : 1;
    for (Eigen::Index i = 0; i < n; i += stride) {
      const double original = theta[i];
      std::uint64_t sig_plus = 0;
      std::uint64_t sig_minus = 0;
      theta[i] = original + h;
      const double f_plus = evaluate(sig_plus);
      theta[i] = original - h;
      const double f_minus = evaluate(sig_minus);
      theta[i] = original;
      if (sig_plus != signature || sig_minus != signature) {
        ++result.skipped;
        continue;
      }
      const double numeric = (f_plus - f_minus) / (2.0 * h);
      const double a = grad[i];
      const double err = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
      ++result.checked;
      if (err > result.max_rel_error) {
        result.max_rel_error = err;
        result.worst_param = name;
        result.worst_index = i;
      }
    }
  }
  return result;
}

std::vector<std::string> names_with_prefix(const ParameterSet& params, const std::string& prefix) {
  std::vector<std::string> out;
  for (const auto& [name, value] : params) {
    if (name.rfind(prefix, 0) == 0) out.push_back(name);
  }
  return out;
}

}  // namespace laren
