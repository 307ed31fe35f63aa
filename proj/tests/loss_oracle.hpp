#pragma once

#include <algorithm>
#include <cmath>

#include "laren/objective.hpp"
#include "laren/ops.hpp"
#include "test_util.hpp"

// Straight-line evaluation of the training loss for oracle comparisons.
namespace testutil {

using laren::DiscriminatorFn;
using laren::Graph;
using laren::Perceptual;
using laren::Tensor;
using laren::Var;

inline oracle::Image to_image(const Tensor& t) {
  oracle::Image img(static_cast<std::size_t>(t.dim(0)),
                    oracle::Mat(static_cast<std::size_t>(t.dim(1)), oracle::Vec(static_cast<std::size_t>(t.dim(2)))));
  for (Eigen::Index c = 0; c < t.dim(0); ++c)
    for (Eigen::Index y = 0; y < t.dim(1); ++y)
      for (Eigen::Index x = 0; x < t.dim(2); ++x) img[c][y][x] = t(c, y, x);
  return img;
}

inline oracle::Kernel to_kernel(const Tensor& w) {
  oracle::Kernel k(static_cast<std::size_t>(w.dim(0)));
  for (Eigen::Index o = 0; o < w.dim(0); ++o) {
    k[o].resize(static_cast<std::size_t>(w.dim(1)));
    for (Eigen::Index c = 0; c < w.dim(1); ++c) {
      k[o][c] = oracle::Mat(static_cast<std::size_t>(w.dim(2)), oracle::Vec(static_cast<std::size_t>(w.dim(3))));
      for (Eigen::Index y = 0; y < w.dim(2); ++y)
        for (Eigen::Index x = 0; x < w.dim(3); ++x) k[o][c][y][x] = w[((o * w.dim(1) + c) * w.dim(2) + y) * w.dim(3) + x];
    }
  }
  return k;
}

inline oracle::Image relu_image(oracle::Image img) {
  for (auto& ch : img)
    for (auto& row : ch)
      for (auto& v : row) v = oracle::relu(v);
  return img;
}

inline oracle::Image features(const oracle::Image& x, const Perceptual& phi) {
  const oracle::Image h = relu_image(oracle::conv2d(x, to_kernel(phi.w1), to_vec(phi.b1), 1, 1));
  return relu_image(oracle::conv2d(h, to_kernel(phi.w2), to_vec(phi.b2), 2, 1));
}

inline double mean_sq_diff(const oracle::Image& a, const oracle::Image& b) {
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t c = 0; c < a.size(); ++c)
    for (std::size_t y = 0; y < a[c].size(); ++y)
      for (std::size_t x = 0; x < a[c][y].size(); ++x, ++n) acc += (a[c][y][x] - b[c][y][x]) * (a[c][y][x] - b[c][y][x]);
  return acc / static_cast<double>(n);
}

/// Logistic discriminator D(x) = sigmoid(clamp(sum(w * x) + b)).
struct LinearDisc {
  Tensor w;
  double b = 0.0;

  DiscriminatorFn fn() const {
    return [this](Var x) {
      Graph& g = x.graph();
      return sigmoid(clamp(add_scalar(sum(mul(x, g.constant(w))), b), -30.0, 30.0));
    };
  }

  double oracle(const Tensor& x) const {
    double logit = b;
    for (Eigen::Index i = 0; i < x.size(); ++i) logit += w[i] * x[i];
    logit = std::min(30.0, std::max(-30.0, logit));
    return 1.0 / (1.0 + std::exp(-logit));
  }
};

}  // namespace testutil
