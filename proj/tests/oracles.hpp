// Independent loop-level reference implementations used as test oracles.
// Nothing here calls into the library's math; only plain containers.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<std::vector<double>>;

inline Mat matmul(const Mat& a, const Mat& b) {
  Mat c(a.size(), Vec(b[0].size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b[0].size(); ++j)
      for (std::size_t k = 0; k < b.size(); ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline Vec matvec(const Mat& a, const Vec& x) {
  Vec y(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < x.size(); ++k) y[i] += a[i][k] * x[k];
  return y;
}

inline double relu(double x) { return x > 0.0 ? x : 0.0; }

/// exp/sum over the unmasked entries; masked entries 0; all masked -> uniform.
inline Vec softmax(const Vec& x, const std::vector<bool>& masked) {
  Vec out(x.size(), 0.0);
  double total = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!masked[i]) {
      out[i] = std::exp(x[i]);
      total += out[i];
      any = true;
    }
  }
  if (!any) return Vec(x.size(), 1.0 / static_cast<double>(x.size()));
  for (auto& v : out) v /= total;
  return out;
}

inline Vec softmax(const Vec& x) { return softmax(x, std::vector<bool>(x.size(), false)); }

/// One relation vector: softmax(relu(Wattr [u; v]) / ||.||) with zeros masked.
inline Vec hmrr_relation(const Vec& u, const Vec& v, const Mat& wattr) {
  Vec cat(u);
  cat.insert(cat.end(), v.begin(), v.end());
  Vec pre = matvec(wattr, cat);
  double norm2 = 0.0;
  for (auto& p : pre) {
    p = relu(p);
    norm2 += p * p;
  }
  const double norm = std::sqrt(norm2);
  if (norm <= 1e-12) return Vec(pre.size(), 1.0 / static_cast<double>(pre.size()));
  std::vector<bool> masked(pre.size());
  Vec scaled(pre.size());
  for (std::size_t d = 0; d < pre.size(); ++d) {
    masked[d] = pre[d] == 0.0;
    scaled[d] = pre[d] / norm;
  }
  return softmax(scaled, masked);
}

/// Direct ConvKB readout over explicit triplet matrices.
/// relations[p][d] with p = i * J + j; filters K x 3; readout indexed c * K + k.
inline Vec extract_attributes(const Mat& U, const Mat& V, const Mat& relations, const Mat& filters,
                              const Vec& filter_bias, const Vec& readout, double readout_bias) {
  const std::size_t J = U.size(), C = U[0].size(), K = filters.size(), D = relations[0].size();
  Vec f(D, 0.0);
  for (std::size_t d = 0; d < D; ++d) {
    double total = 0.0;
    for (std::size_t i = 0; i < J; ++i) {
      for (std::size_t j = 0; j < J; ++j) {
        Mat M(C, Vec(3));
        for (std::size_t c = 0; c < C; ++c) {
          M[c][0] = U[i][c];
          M[c][1] = static_cast<double>(D) * relations[i * J + j][d];
          M[c][2] = V[j][c];
        }
        double score = 0.0;
        for (std::size_t c = 0; c < C; ++c) {
          for (std::size_t k = 0; k < K; ++k) {
            double conv = filter_bias[k];
            for (std::size_t t = 0; t < 3; ++t) conv += M[c][t] * filters[k][t];
            score += readout[c * K + k] * relu(conv);
          }
        }
        total += score;
      }
    }
    f[d] = relu(total / static_cast<double>(J * J) + readout_bias);
  }
  return f;
}

/// Row-wise softmax of M / sqrt(H).
inline Mat rownorm(const Mat& m, double h) {
  Mat out;
  for (const auto& row : m) {
    Vec scaled(row);
    for (auto& x : scaled) x /= std::sqrt(h);
    out.push_back(softmax(scaled));
  }
  return out;
}

/// (WK g)(WQ g)^T, F x H.
inline Mat attention(const Vec& g, const Mat& wq, const Mat& wk) {
  const Vec q = matvec(wq, g);
  const Vec k = matvec(wk, g);
  Mat a(k.size(), Vec(q.size()));
  for (std::size_t f = 0; f < k.size(); ++f)
    for (std::size_t h = 0; h < q.size(); ++h) a[f][h] = k[f] * q[h];
  return a;
}

/// Second-layer relation matrix built in two explicit steps: carried block
/// T1 Wt^T (F x F) by hand loops, then column concatenation with A2.
inline Mat recursive_relation_step(const Mat& t_prev, const Mat& wt, const Vec& g, const Mat& wq, const Mat& wk) {
  const std::size_t F = t_prev.size();
  const std::size_t H = g.size();
  Mat carried(F, Vec(F, 0.0));
  for (std::size_t r = 0; r < F; ++r)
    for (std::size_t c = 0; c < F; ++c)
      for (std::size_t l = 0; l < t_prev[0].size(); ++l) carried[r][c] += t_prev[r][l] * wt[c][l];
  const Mat a = attention(g, wq, wk);
  Mat joined(F);
  for (std::size_t r = 0; r < F; ++r) {
    joined[r] = carried[r];
    joined[r].insert(joined[r].end(), a[r].begin(), a[r].end());
  }
  return rownorm(joined, static_cast<double>(H));
}

inline Vec generate_code(const Mat& t, const Vec& input) {
  Vec c = matvec(t, input);
  for (auto& x : c) x = relu(x);
  return c;
}

struct AdamTrace {
  double theta, m, v;
};

/// Scalar bias-corrected Adam over a gradient sequence.
inline std::vector<AdamTrace> adam_scalar(double theta, const Vec& grads, double lr, double b1, double b2, double eps) {
  std::vector<AdamTrace> out;
  double m = 0.0, v = 0.0;
  for (std::size_t t = 1; t <= grads.size(); ++t) {
    const double g = grads[t - 1];
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g * g;
    const double mhat = m / (1.0 - std::pow(b1, static_cast<double>(t)));
    const double vhat = v / (1.0 - std::pow(b2, static_cast<double>(t)));
    theta -= lr * mhat / (std::sqrt(vhat) + eps);
    out.push_back({theta, m, v});
  }
  return out;
}

/// Zero-padded 2-D convolution with direct loops. x[c][y][x], w[o][c][ky][kx].
using Image = std::vector<Mat>;
using Kernel = std::vector<std::vector<Mat>>;

inline Image conv2d(const Image& x, const Kernel& w, const Vec& bias, int stride, int pad) {
  const int C = static_cast<int>(x.size()), H = static_cast<int>(x[0].size()), W = static_cast<int>(x[0][0].size());
  const int O = static_cast<int>(w.size()), k = static_cast<int>(w[0][0].size());
  const int Ho = (H + 2 * pad - k) / stride + 1, Wo = (W + 2 * pad - k) / stride + 1;
  Image out(O, Mat(Ho, Vec(Wo, 0.0)));
  for (int o = 0; o < O; ++o)
    for (int oy = 0; oy < Ho; ++oy)
      for (int ox = 0; ox < Wo; ++ox) {
        double acc = bias.empty() ? 0.0 : bias[o];
        for (int c = 0; c < C; ++c)
          for (int ky = 0; ky < k; ++ky)
            for (int kx = 0; kx < k; ++kx) {
              const int iy = oy * stride - pad + ky, ix = ox * stride - pad + kx;
              if (iy < 0 || iy >= H || ix < 0 || ix >= W) continue;
              acc += w[o][c][ky][kx] * x[c][iy][ix];
            }
        out[o][oy][ox] = acc;
      }
  return out;
}

}  // namespace oracle
