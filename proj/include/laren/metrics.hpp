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

#include "laren/tensor.hpp"

namespace laren {

/// 10 log10(peak^2 / MSE); +infinity when the images are identical.
double psnr(const Tensor& estimate, const Tensor& reference, double peak);

/// Pearson correlations between the columns of a samples x dims matrix.
/// Dimensions with variance <= 1e-12 correlate 0 with everything else and
/// keep a unit diagonal.
Tensor correlation_matrix(const Tensor& latents);

struct DciScores {
  double disentanglement = 0.0;
  double completeness = 0.0;
  double informativeness = 0.0;
};

/// 1 - entropy (base Q) of each row of R (P x Q), weighted by row mass.
double disentanglement_score(const Tensor& importance);
/// Mean over columns of 1 - entropy (base P) of each column of R.
double completeness_score(const Tensor& importance);

struct DciResult {
  DciScores scores;
  Tensor importance;            // P x Q, |lasso coefficient|
  std::vector<double> lambdas;  // selected penalty per attribute
};

/// Penalties tried per attribute; the one with the lowest held-out error wins.
inline const std::vector<double> kLassoGrid = {0.0, 0.001, 0.01, 0.03, 0.1};

/// DCI with one L1 linear regressor per attribute. Latents and attributes
/// are standardized with statistics of the first two thirds of the samples;
/// the last third is held out for penalty selection and informativeness
/// (1 - RMSE in units of the attribute's standard deviation, floored at 0).
DciResult dci(const Tensor& latents, const Tensor& attributes);

/// Coordinate-descent lasso on standardized data:
/// min (1/2n)|y - X b|^2 + lambda |b|_1.
Eigen::VectorXd lasso(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda);

/// 1-based inclusive index range a:b.
struct IndexRange {
  Eigen::Index first = 1;
  Eigen::Index last = 1;
  static IndexRange parse(const std::string& text);
};

/// CSV block: header `dim,<c...>`, then one row `<r>,<values...>` per row.
std::string dim_subset_report(const Tensor& corr, IndexRange rows, IndexRange cols);

/// Mean |corr(r, c)| over the block, skipping the diagonal.
double mean_abs_off_diagonal(const Tensor& corr, IndexRange rows, IndexRange cols);

}  // namespace laren
