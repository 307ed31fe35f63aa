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

#include "laren/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "laren/error.hpp"

namespace laren {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kVarianceGuard = 1e-12;

double entropy(const VectorXd& p, double base) {
  double h = 0.0;
  for (double x : p) {
    if (x > 0.0) h -= x * std::log(x);
  }
  return h / std::log(base);
}

struct Standardizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;  // 0 for constant columns

  static Standardizer fit(const MatrixXd& x) {
    Standardizer s;
    s.mean = x.colwise().mean();
    s.scale = Eigen::RowVectorXd::Zero(x.cols());
    for (Index j = 0; j < x.cols(); ++j) {
      const double var = (x.col(j).array() - s.mean[j]).square().mean();
      if (var > kVarianceGuard) s.scale[j] = 1.0 / std::sqrt(var);
    }
    return s;
  }

  MatrixXd apply(const MatrixXd& x) const {
    return (x.rowwise() - mean).array().rowwise() * scale.array();
  }
};

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void check_range(IndexRange r, Index n, const char* what) {
  require(r.first >= 1 && r.first <= r.last && r.last <= n, ErrorCode::kIndexOutOfRange,
          std::string(what) + " range " + std::to_string(r.first) + ":" + std::to_string(r.last) + " outside 1:" +
              std::to_string(n));
}

}  // namespace

double psnr(const Tensor& estimate, const Tensor& reference, double peak) {
  require(estimate.shape() == reference.shape(), ErrorCode::kDimMismatch,
          "psnr: " + shape_string(estimate.shape()) + " vs " + shape_string(reference.shape()));
  require(peak > 0.0, ErrorCode::kBadConfig, "psnr: peak must be positive");
  const double mse = (estimate.values() - reference.values()).squaredNorm() / static_cast<double>(estimate.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

Tensor correlation_matrix(const Tensor& latents) {
  require(latents.rank() == 2, ErrorCode::kDimMismatch, "correlation_matrix expects samples x dims");
  require(latents.rows() >= 2, ErrorCode::kTooFewSamples, "correlation needs at least 2 samples");
  const MatrixXd x = latents.matrix();
  const MatrixXd centered = x.rowwise() - x.colwise().mean();
  const VectorXd var = centered.colwise().squaredNorm() / static_cast<double>(x.rows());
  const MatrixXd cov = centered.transpose() * centered / static_cast<double>(x.rows());
  const Index d = x.cols();
  Tensor corr = Tensor::zeros({d, d});
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      if (i == j) {
        corr(i, j) = 1.0;
      } else if (var[i] > kVarianceGuard && var[j] > kVarianceGuard) {
        corr(i, j) = std::clamp(cov(i, j) / std::sqrt(var[i] * var[j]), -1.0, 1.0);
      }
    }
  }
  return corr;
}

double disentanglement_score(const Tensor& importance) {
  const auto r = importance.matrix();
  const double total = r.sum();
  if (total <= 0.0) return 0.0;
  const Index q = r.cols();
  double score = 0.0;
  for (Index p = 0; p < r.rows(); ++p) {
    const double mass = r.row(p).sum();
    if (mass <= 0.0) continue;
    const double d = q > 1 ? 1.0 - entropy(r.row(p).transpose() / mass, static_cast<double>(q)) : 1.0;
    score += mass / total * d;
  }
  return score;
}

double completeness_score(const Tensor& importance) {
  const auto r = importance.matrix();
  const Index p = r.rows();
  double score = 0.0;
  for (Index j = 0; j < r.cols(); ++j) {
    const double mass = r.col(j).sum();
    if (mass <= 0.0) continue;
    score += p > 1 ? 1.0 - entropy(r.col(j) / mass, static_cast<double>(p)) : 1.0;
  }
  return score / static_cast<double>(r.cols());
}

VectorXd lasso(const MatrixXd& x, const VectorXd& y, double lambda) {
  const double n = static_cast<double>(x.rows());
  const MatrixXd gram = x.transpose() * x / n;
  const VectorXd corr = x.transpose() * y / n;
  const Index p = x.cols();
  VectorXd b = VectorXd::Zero(p);
  VectorXd gb = VectorXd::Zero(p);  // gram * b
  for (int sweep = 0; sweep < 20000; ++sweep) {
    double max_change = 0.0;
    for (Index j = 0; j < p; ++j) {
      if (gram(j, j) <= kVarianceGuard) continue;
      const double rho = corr[j] - gb[j] + gram(j, j) * b[j];
      const double updated = std::copysign(std::max(std::abs(rho) - lambda, 0.0), rho) / gram(j, j);
      const double delta = updated - b[j];
      if (delta != 0.0) {
        gb += gram.col(j) * delta;
        b[j] = updated;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    if (max_change < 1e-12) break;
  }
  return b;
}

DciResult dci(const Tensor& latents, const Tensor& attributes) {
  require(latents.rank() == 2 && attributes.rank() == 2 && latents.rows() == attributes.rows(),
          ErrorCode::kDimMismatch,
          "dci: latents " + shape_string(latents.shape()) + " and attributes " + shape_string(attributes.shape()));
  const Index n = latents.rows();
  const Index q = attributes.cols();
  require(n >= q + 2, ErrorCode::kTooFewSamples,
          "dci needs at least " + std::to_string(q + 2) + " samples, got " + std::to_string(n));
  const Index n_train = (2 * n) / 3;
  const Index n_test = n - n_train;
  const MatrixXd x_all = latents.matrix();
  const MatrixXd a_all = attributes.matrix();
  const Standardizer sx = Standardizer::fit(x_all.topRows(n_train));
  const Standardizer sa = Standardizer::fit(a_all.topRows(n_train));
  for (Index j = 0; j < q; ++j) {
    require(sa.scale[j] > 0.0, ErrorCode::kDegenerateAttributes, "attribute " + std::to_string(j + 1) + " is constant");
  }
  const MatrixXd x = sx.apply(x_all);
  const MatrixXd a = sa.apply(a_all);
  const MatrixXd x_train = x.topRows(n_train);
  const MatrixXd x_test = x.bottomRows(n_test);

  DciResult result;
  result.importance = Tensor::zeros({latents.cols(), q});
  double informativeness = 0.0;
  for (Index j = 0; j < q; ++j) {
    const VectorXd y_train = a.col(j).head(n_train);
    const VectorXd y_test = a.col(j).tail(n_test);
    double best_err = std::numeric_limits<double>::infinity();
    VectorXd best;
    double best_lambda = 0.0;
    for (double lambda : kLassoGrid) {
      VectorXd b = lasso(x_train, y_train, lambda);
      const double err = (x_test * b - y_test).squaredNorm() / static_cast<double>(n_test);
      if (err < best_err) {
        best_err = err;
        best = std::move(b);
        best_lambda = lambda;
      }
    }
    result.lambdas.push_back(best_lambda);
    for (Index p = 0; p < best.size(); ++p) result.importance(p, j) = std::abs(best[p]);
    informativeness += std::max(0.0, 1.0 - std::sqrt(best_err));
  }
  result.scores.disentanglement = disentanglement_score(result.importance);
  result.scores.completeness = completeness_score(result.importance);
  result.scores.informativeness = informativeness / static_cast<double>(q);
  return result;
}

IndexRange IndexRange::parse(const std::string& text) {
  const auto colon = text.find(':');
  require(colon != std::string::npos, ErrorCode::kBadConfig, "range must look like a:b, got '" + text + "'");
  try {
    std::size_t used_a = 0, used_b = 0;
    const std::string a = text.substr(0, colon), b = text.substr(colon + 1);
    IndexRange r{std::stol(a, &used_a), std::stol(b, &used_b)};
    require(used_a == a.size() && used_b == b.size(), ErrorCode::kBadConfig, "range must look like a:b, got '" + text + "'");
    return r;
  } catch (const std::logic_error&) {
    fail(ErrorCode::kBadConfig, "range must look like a:b, got '" + text + "'");
  }
}

std::string dim_subset_report(const Tensor& corr, IndexRange rows, IndexRange cols) {
  require(corr.rank() == 2, ErrorCode::kDimMismatch, "dim_subset_report expects a matrix");
  check_range(rows, corr.rows(), "row");
  check_range(cols, corr.cols(), "column");
  std::ostringstream out;
  out << "dim";
  for (Index c = cols.first; c <= cols.last; ++c) out << ',' << c;
  out << '\n';
  for (Index r = rows.first; r <= rows.last; ++r) {
    out << r;
    for (Index c = cols.first; c <= cols.last; ++c) out << ',' << format_value(corr(r - 1, c - 1));
    out << '\n';
  }
  return out.str();
}

double mean_abs_off_diagonal(const Tensor& corr, IndexRange rows, IndexRange cols) {
  check_range(rows, corr.rows(), "row");
  check_range(cols, corr.cols(), "column");
  double total = 0.0;
  Index count = 0;
  for (Index r = rows.first; r <= rows.last; ++r) {
    for (Index c = cols.first; c <= cols.last; ++c) {
      if (r == c) continue;
      total += std::abs(corr(r - 1, c - 1));
      ++count;
    }
  }
  return count > 0 ? total / static_cast<double>(count) : 0.0;
}

}  // namespace laren
