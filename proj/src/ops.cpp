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

#include "laren/ops.hpp"

#include <algorithm>
#include <cmath>

namespace laren {
namespace {

using Index = Eigen::Index;
using Vec = Tensor::Vector;

Graph& shared_graph(Var a, Var b) {
  require(a.valid() && b.valid(), ErrorCode::kDimMismatch, "invalid operand");
  require(&a.graph() == &b.graph(), ErrorCode::kDimMismatch, "operands belong to different graphs");
  return a.graph();
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  require(a.shape() == b.shape(), ErrorCode::kDimMismatch,
          std::string(op) + ": " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
}

/// Pointwise op; `deriv(x, y)` is dy/dx at input x with output y.
template <typename Fwd, typename Deriv>
Var pointwise(Var a, Fwd fwd, Deriv deriv) {
  const Tensor& x = a.value();
  Vec out(x.size());
  for (Index i = 0; i < x.size(); ++i) out[i] = fwd(x[i]);
  const int ia = a.id();
  return a.graph().record(Tensor(x.shape(), std::move(out)), {ia},
                          [ia, deriv](Graph& g, const Tensor& y, const Tensor& gy) {
                            const Tensor& xin = g.value(ia);
                            Tensor& gx = g.grad(ia);
                            for (Index i = 0; i < y.size(); ++i) gx[i] += gy[i] * deriv(xin[i], y[i]);
                          });
}

struct AxisSplit {
  Index outer = 1;
  Index extent = 1;
  Index inner = 1;
};

AxisSplit split_at(const Shape& shape, int axis) {
  AxisSplit s;
  for (int i = 0; i < axis; ++i) s.outer *= shape[static_cast<std::size_t>(i)];
  s.extent = shape[static_cast<std::size_t>(axis)];
  for (std::size_t i = static_cast<std::size_t>(axis) + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

void require_axis(const Tensor& t, int axis) {
  require(axis >= 0 && axis < t.rank(), ErrorCode::kDimMismatch,
          "axis " + std::to_string(axis) + " out of range for " + shape_string(t.shape()));
}

Index row_count(const Tensor& t) { return t.rank() == 1 ? 1 : t.dim(0); }
Index col_count(const Tensor& t) { return t.rank() == 1 ? t.size() : t.size() / t.dim(0); }

}  // namespace

Var matmul(Var a, Var b) {
  Graph& g = shared_graph(a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  require(A.rank() == 2, ErrorCode::kDimMismatch, "matmul: left operand must be a matrix, got " + shape_string(A.shape()));
  require(B.rank() <= 2, ErrorCode::kDimMismatch, "matmul: right operand rank > 2");
  require(A.dim(1) == B.dim(0), ErrorCode::kDimMismatch,
          "matmul: " + shape_string(A.shape()) + " x " + shape_string(B.shape()));
  const int ia = a.id();
  const int ib = b.id();
  Tensor out;
  if (B.rank() == 1) {
    Vec y = A.matrix() * B.values();
    out = Tensor({A.dim(0)}, std::move(y));
  } else {
    out = Tensor::from_matrix(A.matrix() * B.matrix());
  }
  return g.record(std::move(out), {ia, ib}, [ia, ib](Graph& gr, const Tensor&, const Tensor& gy) {
    const Tensor& A = gr.value(ia);
    const Tensor& B = gr.value(ib);
    const Index n = B.rank() == 1 ? 1 : B.dim(1);
    const auto G = gy.view(A.dim(0), n);
    const auto Bm = B.view(B.dim(0), n);
    if (gr.requires_grad(ia)) gr.grad(ia).matrix().noalias() += G * Bm.transpose();
    if (gr.requires_grad(ib)) gr.grad(ib).view(B.dim(0), n).noalias() += A.matrix().transpose() * G;
  });
}

Var transpose(Var a) {
  const Tensor& A = a.value();
  require(A.rank() == 2, ErrorCode::kDimMismatch, "transpose needs a matrix");
  const int ia = a.id();
  RowMatrix t = A.matrix().transpose();
  return a.graph().record(Tensor::from_matrix(t), {ia}, [ia](Graph& g, const Tensor&, const Tensor& gy) {
    g.grad(ia).matrix() += gy.matrix().transpose();
  });
}

Var add(Var a, Var b) {
  Graph& g = shared_graph(a, b);
  require_same_shape(a.value(), b.value(), "add");
  const int ia = a.id();
  const int ib = b.id();
  Vec out = a.value().values() + b.value().values();
  return g.record(Tensor(a.shape(), std::move(out)), {ia, ib}, [ia, ib](Graph& gr, const Tensor&, const Tensor& gy) {
    if (gr.requires_grad(ia)) gr.grad(ia).values() += gy.values();
    if (gr.requires_grad(ib)) gr.grad(ib).values() += gy.values();
  });
}

Var sub(Var a, Var b) {
  Graph& g = shared_graph(a, b);
  require_same_shape(a.value(), b.value(), "sub");
  const int ia = a.id();
  const int ib = b.id();
  Vec out = a.value().values() - b.value().values();
  return g.record(Tensor(a.shape(), std::move(out)), {ia, ib}, [ia, ib](Graph& gr, const Tensor&, const Tensor& gy) {
    if (gr.requires_grad(ia)) gr.grad(ia).values() += gy.values();
    if (gr.requires_grad(ib)) gr.grad(ib).values() -= gy.values();
  });
}

Var mul(Var a, Var b) {
  Graph& g = shared_graph(a, b);
  require_same_shape(a.value(), b.value(), "mul");
  const int ia = a.id();
  const int ib = b.id();
  Vec out = a.value().values().cwiseProduct(b.value().values());
  return g.record(Tensor(a.shape(), std::move(out)), {ia, ib}, [ia, ib](Graph& gr, const Tensor&, const Tensor& gy) {
    if (gr.requires_grad(ia)) gr.grad(ia).values() += gy.values().cwiseProduct(gr.value(ib).values());
    if (gr.requires_grad(ib)) gr.grad(ib).values() += gy.values().cwiseProduct(gr.value(ia).values());
  });
}

Var scale(Var a, double factor) {
  return pointwise(a, [factor](double x) { return factor * x; }, [factor](double, double) { return factor; });
}

Var add_scalar(Var a, double offset) {
  return pointwise(a, [offset](double x) { return x + offset; }, [](double, double) { return 1.0; });
}

Var relu(Var a) {
  BranchHash h;
  for (double x : a.value().span()) h.add(x > 0.0);
  a.graph().note_branches(h.value());
  return pointwise(a, [](double x) { return x > 0.0 ? x : 0.0; },
                   [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var leaky_relu(Var a, double slope) {
  BranchHash h;
  for (double x : a.value().span()) h.add(x > 0.0);
  a.graph().note_branches(h.value());
  return pointwise(a, [slope](double x) { return x > 0.0 ? x : slope * x; },
                   [slope](double x, double) { return x > 0.0 ? 1.0 : slope; });
}

Var sigmoid(Var a) {
  return pointwise(a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
                   [](double, double y) { return y * (1.0 - y); });
}

Var log(Var a) {
  for (double x : a.value().span()) {
    require(x > 0.0, ErrorCode::kNonFinite, "log of non-positive value");
  }
  return pointwise(a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Var clamp(Var a, double lo, double hi) {
  BranchHash h;
  for (double x : a.value().span()) {
    h.add(x < lo);
    h.add(x > hi);
  }
  a.graph().note_branches(h.value());
  return pointwise(a, [lo, hi](double x) { return std::clamp(x, lo, hi); },
                   [lo, hi](double x, double) { return (x < lo || x > hi) ? 0.0 : 1.0; });
}

Var square(Var a) {
  return pointwise(a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Var sum(Var a) {
  const int ia = a.id();
  return a.graph().record(Tensor::scalar(a.value().values().sum()), {ia},
                          [ia](Graph& g, const Tensor&, const Tensor& gy) { g.grad(ia).values().array() += gy[0]; });
}

Var mean(Var a) {
  const int ia = a.id();
  const double n = static_cast<double>(a.value().size());
  return a.graph().record(Tensor::scalar(a.value().values().sum() / n), {ia},
                          [ia, n](Graph& g, const Tensor&, const Tensor& gy) { g.grad(ia).values().array() += gy[0] / n; });
}

Var softmax(Var a, const Mask& mask) {
  const Tensor& x = a.value();
  require(x.rank() <= 2, ErrorCode::kDimMismatch, "softmax expects a vector or matrix");
  require(mask.empty() || static_cast<Index>(mask.size()) == x.size(), ErrorCode::kDimMismatch,
          "softmax mask length mismatch");
  const Index rows = row_count(x);
  const Index cols = col_count(x);
  Vec out(x.size());
  BranchHash h;
  for (bool m : mask) h.add(m);
  a.graph().note_branches(h.value());
  auto masked = [&mask](Index i) { return !mask.empty() && mask[static_cast<std::size_t>(i)]; };
  for (Index r = 0; r < rows; ++r) {
    const Index base = r * cols;
    double peak = -INFINITY;
    for (Index c = 0; c < cols; ++c) {
      if (!masked(base + c)) peak = std::max(peak, x[base + c]);
    }
    if (peak == -INFINITY) {
      for (Index c = 0; c < cols; ++c) out[base + c] = 1.0 / static_cast<double>(cols);
      continue;
    }
    double total = 0.0;
    for (Index c = 0; c < cols; ++c) {
      const double e = masked(base + c) ? 0.0 : std::exp(x[base + c] - peak);
      out[base + c] = e;
      total += e;
    }
    for (Index c = 0; c < cols; ++c) out[base + c] /= total;
  }
  const int ia = a.id();
  return a.graph().record(Tensor(x.shape(), std::move(out)), {ia},
                          [ia, rows, cols, mask](Graph& g, const Tensor& y, const Tensor& gy) {
    Tensor& gx = g.grad(ia);
    for (Index r = 0; r < rows; ++r) {
      const Index base = r * cols;
      bool all_masked = !mask.empty();
      for (Index c = 0; c < cols && all_masked; ++c) all_masked = mask[static_cast<std::size_t>(base + c)];
      if (all_masked) continue;
      double dot = 0.0;
      for (Index c = 0; c < cols; ++c) dot += y[base + c] * gy[base + c];
      for (Index c = 0; c < cols; ++c) gx[base + c] += y[base + c] * (gy[base + c] - dot);
    }
  });
}

Var l2_normalize(Var a, std::vector<bool>* degenerate) {
  const Tensor& x = a.value();
  require(x.rank() <= 2, ErrorCode::kDimMismatch, "l2_normalize expects a vector or matrix");
  const Index rows = row_count(x);
  const Index cols = col_count(x);
  const auto X = x.view(rows, cols);
  Vec norms = X.rowwise().norm();
  Vec out = x.values();
  auto Y = Eigen::Map<RowMatrix>(out.data(), rows, cols);
  BranchHash h;
  if (degenerate) degenerate->assign(static_cast<std::size_t>(rows), false);
  for (Index r = 0; r < rows; ++r) {
    const bool flat = norms[r] <= kNormEpsilon;
    h.add(flat);
    if (flat) {
      if (degenerate) (*degenerate)[static_cast<std::size_t>(r)] = true;
    } else {
      Y.row(r) /= norms[r];
    }
  }
  a.graph().note_branches(h.value());
  const int ia = a.id();
  return a.graph().record(Tensor(x.shape(), std::move(out)), {ia},
                          [ia, rows, cols, norms](Graph& g, const Tensor& y, const Tensor& gy) {
    auto GX = g.grad(ia).view(rows, cols);
    const auto Yv = y.view(rows, cols);
    const auto GY = gy.view(rows, cols);
    for (Index r = 0; r < rows; ++r) {
      if (norms[r] <= kNormEpsilon) {
        GX.row(r) += GY.row(r);
      } else {
        const double dot = Yv.row(r).dot(GY.row(r));
        GX.row(r) += (GY.row(r) - dot * Yv.row(r)) / norms[r];
      }
    }
  });
}

Var concat(Var a, Var b, int axis) {
  Graph& g = shared_graph(a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  require_axis(A, axis);
  require(A.rank() == B.rank(), ErrorCode::kDimMismatch, "concat: rank mismatch");
  for (int i = 0; i < A.rank(); ++i) {
    require(i == axis || A.dim(i) == B.dim(i), ErrorCode::kDimMismatch,
            "concat: " + shape_string(A.shape()) + " vs " + shape_string(B.shape()));
  }
  const AxisSplit sa = split_at(A.shape(), axis);
  const AxisSplit sb = split_at(B.shape(), axis);
  const Index block_a = sa.extent * sa.inner;
  const Index block_b = sb.extent * sb.inner;
  Shape shape = A.shape();
  shape[static_cast<std::size_t>(axis)] += B.dim(axis);
  Vec out(A.size() + B.size());
  for (Index o = 0; o < sa.outer; ++o) {
    out.segment(o * (block_a + block_b), block_a) = A.values().segment(o * block_a, block_a);
    out.segment(o * (block_a + block_b) + block_a, block_b) = B.values().segment(o * block_b, block_b);
  }
  const int ia = a.id();
  const int ib = b.id();
  return g.record(Tensor(std::move(shape), std::move(out)), {ia, ib},
                  [ia, ib, outer = sa.outer, block_a, block_b](Graph& gr, const Tensor&, const Tensor& gy) {
    for (Index o = 0; o < outer; ++o) {
      if (gr.requires_grad(ia)) {
        gr.grad(ia).values().segment(o * block_a, block_a) += gy.values().segment(o * (block_a + block_b), block_a);
      }
      if (gr.requires_grad(ib)) {
        gr.grad(ib).values().segment(o * block_b, block_b) +=
            gy.values().segment(o * (block_a + block_b) + block_a, block_b);
      }
    }
  });
}

Var reshape(Var a, Shape shape) {
  const int ia = a.id();
  return a.graph().record(a.value().reshaped(std::move(shape)), {ia},
                          [ia](Graph& g, const Tensor&, const Tensor& gy) { g.grad(ia).values() += gy.values(); });
}

Var slice(Var a, int axis, Index begin, Index end) {
  const Tensor& A = a.value();
  require_axis(A, axis);
  require(0 <= begin && begin < end && end <= A.dim(axis), ErrorCode::kIndexOutOfRange,
          "slice [" + std::to_string(begin) + ", " + std::to_string(end) + ") of " + shape_string(A.shape()));
  const AxisSplit s = split_at(A.shape(), axis);
  const Index width = (end - begin) * s.inner;
  Shape shape = A.shape();
  shape[static_cast<std::size_t>(axis)] = end - begin;
  Vec out(s.outer * width);
  for (Index o = 0; o < s.outer; ++o) {
    out.segment(o * width, width) = A.values().segment(o * s.extent * s.inner + begin * s.inner, width);
  }
  const int ia = a.id();
  return a.graph().record(Tensor(std::move(shape), std::move(out)), {ia},
                          [ia, s, begin, width](Graph& g, const Tensor&, const Tensor& gy) {
    Tensor& gx = g.grad(ia);
    for (Index o = 0; o < s.outer; ++o) {
      gx.values().segment(o * s.extent * s.inner + begin * s.inner, width) += gy.values().segment(o * width, width);
    }
  });
}

Var repeat_columns(Var v, Index count) {
  const Tensor& x = v.value();
  require(x.rank() == 1, ErrorCode::kDimMismatch, "repeat_columns expects a vector");
  RowMatrix m = x.values().replicate(1, count);
  const int iv = v.id();
  return v.graph().record(Tensor::from_matrix(m), {iv}, [iv](Graph& g, const Tensor&, const Tensor& gy) {
    g.grad(iv).values() += gy.matrix().rowwise().sum();
  });
}

Var pair_features(Var u, Var v) {
  Graph& g = shared_graph(u, v);
  const Tensor& U = u.value();
  const Tensor& V = v.value();
  require(U.rank() == 2 && U.shape() == V.shape(), ErrorCode::kDimMismatch,
          "pair_features: node matrices " + shape_string(U.shape()) + " and " + shape_string(V.shape()));
  const Index J = U.dim(0);
  const Index C = U.dim(1);
  RowMatrix out(J * J, 2 * C);
  for (Index i = 0; i < J; ++i) {
    for (Index j = 0; j < J; ++j) {
      out.row(i * J + j) << U.matrix().row(i), V.matrix().row(j);
    }
  }
  const int iu = u.id();
  const int iv = v.id();
  return g.record(Tensor::from_matrix(out), {iu, iv}, [iu, iv, J, C](Graph& gr, const Tensor&, const Tensor& gy) {
    const auto G = gy.matrix();
    if (gr.requires_grad(iu)) {
      auto GU = gr.grad(iu).matrix();
      for (Index i = 0; i < J; ++i) GU.row(i) += G.block(i * J, 0, J, C).colwise().sum();
    }
    if (gr.requires_grad(iv)) {
      auto GV = gr.grad(iv).matrix();
      for (Index i = 0; i < J; ++i) {
        for (Index j = 0; j < J; ++j) GV.row(j) += G.block(i * J + j, C, 1, C);
      }
    }
  });
}

Var convkb_extract(Var u, Var v, Var relations, Var filters, Var filter_bias, Var readout, Var readout_bias) {
  Graph& g = shared_graph(u, v);
  shared_graph(u, relations);
  shared_graph(u, filters);
  shared_graph(u, filter_bias);
  shared_graph(u, readout);
  shared_graph(u, readout_bias);
  const Tensor& U = u.value();
  const Tensor& V = v.value();
  const Tensor& R = relations.value();
  const Tensor& W = filters.value();
  const Tensor& B = filter_bias.value();
  const Tensor& w = readout.value();
  require(U.rank() == 2 && U.shape() == V.shape(), ErrorCode::kDimMismatch, "convkb: node matrices differ");
  const Index J = U.dim(0);
  const Index C = U.dim(1);
  const Index P = J * J;
  require(R.rank() == 2 && R.dim(0) == P, ErrorCode::kDimMismatch,
          "convkb: relations " + shape_string(R.shape()) + " must cover " + std::to_string(P) + " pairs");
  const Index D = R.dim(1);
  require(W.rank() == 2 && W.dim(1) == 3, ErrorCode::kDimMismatch, "convkb: filters must be K x 3");
  const Index K = W.dim(0);
  require(B.size() == K, ErrorCode::kDimMismatch, "convkb: filter bias must have K entries");
  require(w.size() == C * K, ErrorCode::kDimMismatch, "convkb: readout must have C*K entries");
  require(readout_bias.value().size() == 1, ErrorCode::kDimMismatch, "convkb: readout bias must be scalar");

  // Relation-independent part of every filter response: (P*C) x K.
  RowMatrix base(P * C, K);
  for (Index i = 0; i < J; ++i) {
    for (Index j = 0; j < J; ++j) {
      for (Index c = 0; c < C; ++c) {
        const Index row = (i * J + j) * C + c;
        for (Index k = 0; k < K; ++k) base(row, k) = W(k, 0) * U(i, c) + W(k, 2) * V(j, c) + B[k];
      }
    }
  }
  const double inv_pairs = 1.0 / static_cast<double>(P);
  const double bias = readout_bias.value()[0];
  Vec pre(D);
  BranchHash h;
  for (Index d = 0; d < D; ++d) {
    double acc = 0.0;
    for (Index p = 0; p < P; ++p) {
      const double r = R(p, d);
      for (Index c = 0; c < C; ++c) {
        const Index row = p * C + c;
        for (Index k = 0; k < K; ++k) {
          const double act = base(row, k) + W(k, 1) * r;
          h.add(act > 0.0);
          if (act > 0.0) acc += w[c * K + k] * act;
        }
      }
    }
    pre[d] = acc * inv_pairs + bias;
    h.add(pre[d] > 0.0);
  }
  g.note_branches(h.value());
  Vec out = pre.cwiseMax(0.0);

  const std::vector<int> ids = {u.id(), v.id(), relations.id(), filters.id(), filter_bias.id(), readout.id(),
                                readout_bias.id()};
  return g.record(Tensor({D}, std::move(out)), ids,
                  [ids, J, C, K, D, P, inv_pairs, base, pre](Graph& gr, const Tensor&, const Tensor& gy) {
    const Tensor& U = gr.value(ids[0]);
    const Tensor& V = gr.value(ids[1]);
    const Tensor& R = gr.value(ids[2]);
    const Tensor& W = gr.value(ids[3]);
    const Tensor& w = gr.value(ids[5]);
    RowMatrix gbase = RowMatrix::Zero(P * C, K);
    RowMatrix gW = RowMatrix::Zero(K, 3);
    Vec gw = Vec::Zero(C * K);
    RowMatrix gR = RowMatrix::Zero(P, D);
    double gbias = 0.0;
    for (Index d = 0; d < D; ++d) {
      if (pre[d] <= 0.0) continue;
      gbias += gy[d];
      const double gd = gy[d] * inv_pairs;
      if (gd == 0.0) continue;
      for (Index p = 0; p < P; ++p) {
        const double r = R(p, d);
        double gr_pd = 0.0;
        for (Index c = 0; c < C; ++c) {
          const Index row = p * C + c;
          for (Index k = 0; k < K; ++k) {
            const double act = base(row, k) + W(k, 1) * r;
            if (act <= 0.0) continue;
            gw[c * K + k] += gd * act;
            const double t = gd * w[c * K + k];
            gW(k, 1) += t * r;
            gr_pd += t * W(k, 1);
            gbase(row, k) += t;
          }
        }
        gR(p, d) += gr_pd;
      }
    }
    Vec gB = gbase.colwise().sum().transpose();
    RowMatrix gU = RowMatrix::Zero(J, C);
    RowMatrix gV = RowMatrix::Zero(J, C);
    for (Index i = 0; i < J; ++i) {
      for (Index j = 0; j < J; ++j) {
        for (Index c = 0; c < C; ++c) {
          const Index row = (i * J + j) * C + c;
          for (Index k = 0; k < K; ++k) {
            const double t = gbase(row, k);
            gW(k, 0) += t * U(i, c);
            gW(k, 2) += t * V(j, c);
            gU(i, c) += t * W(k, 0);
            gV(j, c) += t * W(k, 2);
          }
        }
      }
    }
    if (gr.requires_grad(ids[0])) gr.grad(ids[0]).matrix() += gU;
    if (gr.requires_grad(ids[1])) gr.grad(ids[1]).matrix() += gV;
    if (gr.requires_grad(ids[2])) gr.grad(ids[2]).matrix() += gR;
    if (gr.requires_grad(ids[3])) gr.grad(ids[3]).matrix() += gW;
    if (gr.requires_grad(ids[4])) gr.grad(ids[4]).values() += gB;
    if (gr.requires_grad(ids[5])) gr.grad(ids[5]).values() += gw;
    if (gr.requires_grad(ids[6])) gr.grad(ids[6]).values()[0] += gbias;
  });
}

namespace {

struct ConvGeometry {
  Index channels, height, width, out_channels, kernel, out_h, out_w;
  int stride, padding;
};

// (C*k*k) x (Ho*Wo) patch matrix.
RowMatrix im2col(const Tensor& x, const ConvGeometry& geo) {
  RowMatrix cols = RowMatrix::Zero(geo.channels * geo.kernel * geo.kernel, geo.out_h * geo.out_w);
  for (Index c = 0; c < geo.channels; ++c) {
    for (Index ky = 0; ky < geo.kernel; ++ky) {
      for (Index kx = 0; kx < geo.kernel; ++kx) {
        const Index row = (c * geo.kernel + ky) * geo.kernel + kx;
        for (Index oy = 0; oy < geo.out_h; ++oy) {
          const Index iy = oy * geo.stride - geo.padding + ky;
          if (iy < 0 || iy >= geo.height) continue;
          for (Index ox = 0; ox < geo.out_w; ++ox) {
            const Index ix = ox * geo.stride - geo.padding + kx;
            if (ix < 0 || ix >= geo.width) continue;
            cols(row, oy * geo.out_w + ox) = x[(c * geo.height + iy) * geo.width + ix];
          }
        }
      }
    }
  }
  return cols;
}

void col2im(const RowMatrix& cols, const ConvGeometry& geo, Tensor& gx) {
  for (Index c = 0; c < geo.channels; ++c) {
    for (Index ky = 0; ky < geo.kernel; ++ky) {
      for (Index kx = 0; kx < geo.kernel; ++kx) {
        const Index row = (c * geo.kernel + ky) * geo.kernel + kx;
        for (Index oy = 0; oy < geo.out_h; ++oy) {
          const Index iy = oy * geo.stride - geo.padding + ky;
          if (iy < 0 || iy >= geo.height) continue;
          for (Index ox = 0; ox < geo.out_w; ++ox) {
            const Index ix = ox * geo.stride - geo.padding + kx;
            if (ix < 0 || ix >= geo.width) continue;
            gx[(c * geo.height + iy) * geo.width + ix] += cols(row, oy * geo.out_w + ox);
          }
        }
      }
    }
  }
}

}  // namespace

Var conv2d(Var x, Var weight, Var bias, int stride, int padding) {
  Graph& g = shared_graph(x, weight);
  const Tensor& X = x.value();
  const Tensor& Wt = weight.value();
  require(X.rank() == 3, ErrorCode::kDimMismatch, "conv2d input must be C x H x W, got " + shape_string(X.shape()));
  require(Wt.rank() == 4 && Wt.dim(1) == X.dim(0) && Wt.dim(2) == Wt.dim(3), ErrorCode::kDimMismatch,
          "conv2d weight " + shape_string(Wt.shape()) + " incompatible with input " + shape_string(X.shape()));
  require(stride >= 1 && padding >= 0, ErrorCode::kDimMismatch, "conv2d stride/padding");
  ConvGeometry geo{X.dim(0), X.dim(1), X.dim(2), Wt.dim(0), Wt.dim(2), 0, 0, stride, padding};
  geo.out_h = (geo.height + 2 * padding - geo.kernel) / stride + 1;
  geo.out_w = (geo.width + 2 * padding - geo.kernel) / stride + 1;
  require(geo.out_h > 0 && geo.out_w > 0, ErrorCode::kDimMismatch, "conv2d output would be empty");
  if (bias.valid()) {
    shared_graph(x, bias);
    require(bias.value().size() == geo.out_channels, ErrorCode::kDimMismatch, "conv2d bias length");
  }
  RowMatrix cols = im2col(X, geo);
  const auto Wm = Wt.view(geo.out_channels, geo.channels * geo.kernel * geo.kernel);
  RowMatrix out = Wm * cols;
  if (bias.valid()) out.colwise() += bias.value().values();
  Vec flat = Eigen::Map<const Vec>(out.data(), out.size());
  const int ix = x.id();
  const int iw = weight.id();
  const int ib = bias.valid() ? bias.id() : -1;
  std::vector<int> inputs = {ix, iw};
  if (ib >= 0) inputs.push_back(ib);
  return g.record(Tensor({geo.out_channels, geo.out_h, geo.out_w}, std::move(flat)), inputs,
                  [ix, iw, ib, geo, cols = std::move(cols)](Graph& gr, const Tensor&, const Tensor& gy) {
    const auto G = gy.view(geo.out_channels, geo.out_h * geo.out_w);
    if (gr.requires_grad(iw)) gr.grad(iw).view(geo.out_channels, cols.rows()).noalias() += G * cols.transpose();
    if (ib >= 0 && gr.requires_grad(ib)) gr.grad(ib).values() += G.rowwise().sum();
    if (gr.requires_grad(ix)) {
      const auto Wm = gr.value(iw).view(geo.out_channels, cols.rows());
      RowMatrix gcols = Wm.transpose() * G;
      col2im(gcols, geo, gr.grad(ix));
    }
  });
}

Var upsample_nearest(Var x, int factor) {
  const Tensor& X = x.value();
  require(X.rank() == 3 && factor >= 1, ErrorCode::kDimMismatch, "upsample_nearest expects C x H x W");
  const Index C = X.dim(0), H = X.dim(1), W = X.dim(2);
  const Index Ho = H * factor, Wo = W * factor;
  Vec out(C * Ho * Wo);
  for (Index c = 0; c < C; ++c) {
    for (Index y = 0; y < Ho; ++y) {
      for (Index xx = 0; xx < Wo; ++xx) out[(c * Ho + y) * Wo + xx] = X[(c * H + y / factor) * W + xx / factor];
    }
  }
  const int ix = x.id();
  return x.graph().record(Tensor({C, Ho, Wo}, std::move(out)), {ix},
                          [ix, C, H, W, Ho, Wo, factor](Graph& g, const Tensor&, const Tensor& gy) {
    Tensor& gx = g.grad(ix);
    for (Index c = 0; c < C; ++c) {
      for (Index y = 0; y < Ho; ++y) {
        for (Index xx = 0; xx < Wo; ++xx) gx[(c * H + y / factor) * W + xx / factor] += gy[(c * Ho + y) * Wo + xx];
      }
    }
  });
}

Var instance_norm(Var x, double eps) {
  const Tensor& X = x.value();
  require(X.rank() == 3, ErrorCode::kDimMismatch, "instance_norm expects C x H x W");
  const Index C = X.dim(0);
  const Index HW = X.size() / C;
  const auto xs = X.view(C, HW);
  const Vec mu = xs.rowwise().mean();
  RowMatrix centered = xs.colwise() - mu;
  const Vec inv_std = ((centered.array().square().rowwise().sum() / static_cast<double>(HW)) + eps).rsqrt();
  RowMatrix y = centered.array().colwise() * inv_std.array();
  Vec flat = Eigen::Map<const Vec>(y.data(), y.size());
  const int ix = x.id();
  return x.graph().record(Tensor(X.shape(), std::move(flat)), {ix},
                          [ix, C, HW, inv_std](Graph& g, const Tensor& out, const Tensor& gy) {
    const auto Y = out.view(C, HW);
    const auto G = gy.view(C, HW);
    const Vec g_mean = G.rowwise().mean();
    const Vec gy_mean = G.cwiseProduct(Y).rowwise().mean();
    RowMatrix gx = (G.colwise() - g_mean) - (Y.array().colwise() * gy_mean.array()).matrix();
    gx.array().colwise() *= inv_std.array();
    g.grad(ix).view(C, HW) += gx;
  });
}

Var modulate(Var x, Var scale_by, Var shift) {
  Graph& g = shared_graph(x, scale_by);
  shared_graph(x, shift);
  const Tensor& X = x.value();
  require(X.rank() == 3, ErrorCode::kDimMismatch, "modulate expects C x H x W");
  const Index C = X.dim(0);
  const Index HW = X.size() / C;
  require(scale_by.value().size() == C && shift.value().size() == C, ErrorCode::kDimMismatch,
          "modulate: scale/shift must have one entry per channel");
  RowMatrix out = X.view(C, HW);
  out.array().colwise() *= scale_by.value().values().array();
  out.colwise() += shift.value().values();
  Vec flat = Eigen::Map<const Vec>(out.data(), out.size());
  const int ix = x.id(), is = scale_by.id(), it = shift.id();
  return g.record(Tensor(X.shape(), std::move(flat)), {ix, is, it},
                  [ix, is, it, C, HW](Graph& gr, const Tensor&, const Tensor& gy) {
    const auto G = gy.view(C, HW);
    if (gr.requires_grad(ix)) {
      RowMatrix gx = G;
      gx.array().colwise() *= gr.value(is).values().array();
      gr.grad(ix).view(C, HW) += gx;
    }
    if (gr.requires_grad(is)) {
      gr.grad(is).values() += G.cwiseProduct(gr.value(ix).view(C, HW)).rowwise().sum();
    }
    if (gr.requires_grad(it)) gr.grad(it).values() += G.rowwise().sum();
  });
}

Var add_channel_map(Var x, Var map, Var gain) {
  Graph& g = shared_graph(x, map);
  shared_graph(x, gain);
  const Tensor& X = x.value();
  require(X.rank() == 3, ErrorCode::kDimMismatch, "add_channel_map expects C x H x W");
  const Index C = X.dim(0);
  const Index HW = X.size() / C;
  require(map.value().size() == HW, ErrorCode::kDimMismatch,
          "add_channel_map: map " + shape_string(map.value().shape()) + " vs input " + shape_string(X.shape()));
  require(gain.value().size() == C, ErrorCode::kDimMismatch, "add_channel_map: gain must have one entry per channel");
  RowMatrix out = X.view(C, HW);
  out.noalias() += gain.value().values() * map.value().values().transpose();
  Vec flat = Eigen::Map<const Vec>(out.data(), out.size());
  const int ix = x.id(), im = map.id(), ig = gain.id();
  return g.record(Tensor(X.shape(), std::move(flat)), {ix, im, ig},
                  [ix, im, ig, C, HW](Graph& gr, const Tensor&, const Tensor& gy) {
    const auto G = gy.view(C, HW);
    if (gr.requires_grad(ix)) gr.grad(ix).values() += gy.values();
    if (gr.requires_grad(im)) gr.grad(im).values() += G.transpose() * gr.value(ig).values();
    if (gr.requires_grad(ig)) gr.grad(ig).values() += G * gr.value(im).values();
  });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  Graph g;
  return matmul(g.constant(a), g.constant(b)).value();
}

Tensor relu(const Tensor& a) {
  Graph g;
  return relu(g.constant(a)).value();
}

Tensor leaky_relu(const Tensor& a, double slope) {
  Graph g;
  return leaky_relu(g.constant(a), slope).value();
}

Tensor softmax(const Tensor& a, const Mask& mask) {
  Graph g;
  return softmax(g.constant(a), mask).value();
}

Tensor concat(const Tensor& a, const Tensor& b, int axis) {
  Graph g;
  return concat(g.constant(a), g.constant(b), axis).value();
}

NormalizeResult l2_normalize(const Tensor& a) {
  Graph g;
  std::vector<bool> flags;
  Tensor value = l2_normalize(g.constant(a), &flags).value();
  return {std::move(value), flags.size() == 1 && flags[0]};
}

Tensor mean_pool(const Tensor& image, int s) {
  require(image.rank() == 3 && s >= 1, ErrorCode::kDimMismatch, "mean_pool expects C x H x W");
  const Index C = image.dim(0), H = image.dim(1), W = image.dim(2);
  require(H % s == 0 && W % s == 0, ErrorCode::kDimMismatch,
          "image " + shape_string(image.shape()) + " not divisible by " + std::to_string(s));
  const Index Ho = H / s, Wo = W / s;
  Vec out = Vec::Zero(C * Ho * Wo);
  const double inv = 1.0 / static_cast<double>(s * s);
  for (Index c = 0; c < C; ++c) {
    for (Index oy = 0; oy < Ho; ++oy) {
      for (Index ox = 0; ox < Wo; ++ox) {
        // Deviations from the block's first pixel, so constant blocks stay exact.
        const double anchor = image(c, oy * s, ox * s);
        double acc = 0.0;
        for (Index dy = 0; dy < s; ++dy) {
          for (Index dx = 0; dx < s; ++dx) acc += image(c, oy * s + dy, ox * s + dx) - anchor;
        }
        out[(c * Ho + oy) * Wo + ox] = anchor + acc * inv;
      }
    }
  }
  return Tensor({C, Ho, Wo}, std::move(out));
}

}  // namespace laren
