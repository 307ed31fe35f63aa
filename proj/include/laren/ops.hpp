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

#include <vector>

#include "laren/autodiff.hpp"

namespace laren {

/// true marks an excluded entry.
using Mask = std::vector<bool>;

inline constexpr double kNormEpsilon = 1e-12;

// Differentiable operations. Each records one node on the graph of its first
// operand; operands must share a graph.

/// (m x k)(k x n). A rank-1 right operand is a column and yields a rank-1 result.
Var matmul(Var a, Var b);
Var transpose(Var a);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);
Var add_scalar(Var a, double offset);
inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, Var b) { return mul(a, b); }
inline Var operator*(double s, Var a) { return scale(a, s); }

Var relu(Var a);
Var leaky_relu(Var a, double slope);
Var sigmoid(Var a);
Var log(Var a);
Var clamp(Var a, double lo, double hi);
Var square(Var a);

Var sum(Var a);
Var mean(Var a);

/// Row-wise softmax of a rank-1 (single row) or rank-2 tensor. Masked entries
/// are exactly 0; a fully masked row is uniform over the row.
Var softmax(Var a, const Mask& mask = {});

/// Row-wise x / ||x||_2. Rows with norm <= kNormEpsilon pass through
/// unchanged and are reported in `degenerate` when given.
Var l2_normalize(Var a, std::vector<bool>* degenerate = nullptr);

Var concat(Var a, Var b, int axis);
Var reshape(Var a, Shape shape);
/// Entries [begin, end) along `axis`.
Var slice(Var a, int axis, Eigen::Index begin, Eigen::Index end);
/// v (length n) -> n x count matrix with every column equal to v.
Var repeat_columns(Var v, Eigen::Index count);

/// Rows (i * J + j) = [U_i, V_j] for J x C node matrices; result J^2 x 2C.
Var pair_features(Var u, Var v);

/// Shared-filter ConvKB readout over D attribute sub-graphs.
///
/// For attribute d and node pair p = (i, j), the triplet matrix
/// [U_i | R(p, d) 1_C | V_j] (C x 3) is convolved row-wise with K filters of
/// width 3 (`filters` K x 3, `filter_bias` K), passed through ReLU, flattened
/// row-major (index c*K + k) and scored by `readout` (C*K). Scores are averaged
/// over all J^2 pairs, offset by `readout_bias` (1) and passed through ReLU.
/// Relations R are J^2 x D; the result has length D.
Var convkb_extract(Var u, Var v, Var relations, Var filters, Var filter_bias, Var readout,
                   Var readout_bias);

/// 2-D convolution of a C x H x W input with O x C x k x k weights, zero
/// padding. `bias` (length O) may be an invalid Var.
Var conv2d(Var x, Var weight, Var bias, int stride, int padding);
Var upsample_nearest(Var x, int factor);
/// Per-channel (x - mean) / sqrt(var + eps) over the spatial positions.
Var instance_norm(Var x, double eps = 1e-8);
/// x[c] * scale[c] + shift[c] for a C x H x W input.
Var modulate(Var x, Var scale, Var shift);
/// x[c] + gain[c] * map for a C x H x W input and H x W map.
Var add_channel_map(Var x, Var map, Var gain);

// Tensor-level conveniences; each evaluates the differentiable op on constants.

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor relu(const Tensor& a);
Tensor leaky_relu(const Tensor& a, double slope);
Tensor softmax(const Tensor& a, const Mask& mask = {});
Tensor concat(const Tensor& a, const Tensor& b, int axis);

struct NormalizeResult {
  Tensor value;
  bool degenerate = false;
};
NormalizeResult l2_normalize(const Tensor& a);

/// s x s box average of a C x H x W image.
Tensor mean_pool(const Tensor& image, int s);

}  // namespace laren
