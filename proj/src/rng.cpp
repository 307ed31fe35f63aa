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

#include "laren/rng.hpp"

namespace laren {

Tensor rng_uniform(Rng& rng, Shape shape, double lo, double hi) {
  Tensor::Vector v(shape_size(shape));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.uniform(lo, hi);
  return Tensor(std::move(shape), std::move(v));
}

Tensor rng_normal(Rng& rng, Shape shape, double mean, double stddev) {
  Tensor::Vector v(shape_size(shape));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal(mean, stddev);
  return Tensor(std::move(shape), std::move(v));
}

}  // namespace laren
