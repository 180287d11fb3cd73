// Copyright 2026 The s2st Authors.
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

#include "s2st/nd/ops.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "s2st/common/error.h"

namespace s2st::nd {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMajor>;
using ConstMatMap = Eigen::Map<const RowMajor>;

using NodePtr = std::shared_ptr<Node>;

[[noreturn]] void ShapeFail(OpKind kind, const std::string& detail) {
  throw ShapeError(std::string(OpName(kind)) + ": " + detail);
}

bool SameShape(const Tensor& a, const Tensor& b) { return a.shape() == b.shape(); }

bool IsRowBroadcast(const Tensor& a, const Tensor& b) {
  return b.rank() == 1 && a.rank() >= 1 && b.dim(0) == a.dim(-1);
}

int64_t NormalizeAxis(int64_t axis, int64_t rank, OpKind kind) {
  if (axis < 0) axis += rank;
  if (axis < 0 || axis >= rank) {
    ShapeFail(kind, "axis " + std::to_string(axis) + " out of range for rank " +
                        std::to_string(rank));
  }
  return axis;
}

// Elementwise unary op with derivative expressed through input x and output y.
template <typename F, typename D>
Tensor Unary(OpKind kind, const Tensor& x, F f, D dfdx) {
  const auto& xv = x.values();
  std::vector<double> out(xv.size());
  for (size_t i = 0; i < xv.size(); ++i) out[i] = f(xv[i]);
  NodePtr xn = x.node();
  auto result = MakeResult(kind, x.shape(), std::move(out), {x}, nullptr);
  if (result.requires_grad()) {
    Node* self = result.node().get();
    self->backward = [xn, self, dfdx](const std::vector<double>& g,
                                      std::span<std::vector<double>* const> grads) {
      auto& gx = *grads[0];
      for (size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * dfdx(xn->value[i], self->value[i]);
    };
  }
  return result;
}

}  // namespace

AttentionMask AttentionMask::All(int64_t rows, int64_t cols) {
  AttentionMask m;
  m.rows = rows;
  m.cols = cols;
  m.allowed.assign(rows * cols, 1);
  return m;
}

AttentionMask AttentionMask::Causal(int64_t n) {
  AttentionMask m;
  m.rows = n;
  m.cols = n;
  m.allowed.assign(n * n, 0);
  for (int64_t r = 0; r < n; ++r) {
    for (int64_t c = 0; c <= r; ++c) m.allowed[r * n + c] = 1;
  }
  return m;
}

int64_t ConvOutputExtent(int64_t in, int64_t kernel, int64_t stride, Padding padding) {
  if (padding == Padding::kSame) return (in + stride - 1) / stride;
  if (in < kernel) return 0;
  return (in - kernel) / stride + 1;
}

Tensor MatMul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    ShapeFail(OpKind::kMatMul, "cannot multiply " + ShapeToString(a.shape()) +
                                   " by " + ShapeToString(b.shape()));
  }
  const int64_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  std::vector<double> out(m * n, 0.0);
  if (m > 0 && n > 0 && k > 0) {
    MatMap(out.data(), m, n).noalias() =
        ConstMatMap(a.data().data(), m, k) * ConstMatMap(b.data().data(), k, n);
  }
  NodePtr an = a.node(), bn = b.node();
  return MakeResult(
      OpKind::kMatMul, {m, n}, std::move(out), {a, b},
      [an, bn, m, k, n](const std::vector<double>& g,
                        std::span<std::vector<double>* const> grads) {
        ConstMatMap gm(g.data(), m, n);
        if (grads[0]) {
          MatMap(grads[0]->data(), m, k).noalias() +=
              gm * ConstMatMap(bn->value.data(), k, n).transpose();
        }
        if (grads[1]) {
          MatMap(grads[1]->data(), k, n).noalias() +=
              ConstMatMap(an->value.data(), m, k).transpose() * gm;
        }
      });
}

namespace {

enum class Binary { kAdd, kSub, kMul };

Tensor BinaryOp(OpKind kind, Binary op, const Tensor& a, const Tensor& b) {
  const bool same = SameShape(a, b);
  const bool row = !same && op != Binary::kSub && IsRowBroadcast(a, b);
  if (!same && !row) {
    ShapeFail(kind, "incompatible shapes " + ShapeToString(a.shape()) + " and " +
                        ShapeToString(b.shape()));
  }
  const auto& av = a.values();
  const auto& bv = b.values();
  const size_t n = av.size();
  const size_t cols = same ? n : bv.size();
  std::vector<double> out(n);
  for (size_t i = 0; i < n; ++i) {
    const double y = bv[same ? i : i % cols];
    switch (op) {
      case Binary::kAdd: out[i] = av[i] + y; break;
      case Binary::kSub: out[i] = av[i] - y; break;
      case Binary::kMul: out[i] = av[i] * y; break;
    }
  }
  NodePtr an = a.node(), bn = b.node();
  return MakeResult(
      kind, a.shape(), std::move(out), {a, b},
      [an, bn, op, same, cols](const std::vector<double>& g,
                               std::span<std::vector<double>* const> grads) {
        const size_t n = g.size();
        if (grads[0]) {
          auto& ga = *grads[0];
          if (op == Binary::kMul) {
            for (size_t i = 0; i < n; ++i) ga[i] += g[i] * bn->value[same ? i : i % cols];
          } else {
            for (size_t i = 0; i < n; ++i) ga[i] += g[i];
          }
        }
        if (grads[1]) {
          auto& gb = *grads[1];
          for (size_t i = 0; i < n; ++i) {
            const size_t j = same ? i : i % cols;
            switch (op) {
              case Binary::kAdd: gb[j] += g[i]; break;
              case Binary::kSub: gb[j] -= g[i]; break;
              case Binary::kMul: gb[j] += g[i] * an->value[i]; break;
            }
          }
        }
      });
}

}  // namespace

Tensor Add(const Tensor& a, const Tensor& b) { return BinaryOp(OpKind::kAdd, Binary::kAdd, a, b); }
Tensor Sub(const Tensor& a, const Tensor& b) { return BinaryOp(OpKind::kSub, Binary::kSub, a, b); }
Tensor Mul(const Tensor& a, const Tensor& b) { return BinaryOp(OpKind::kMul, Binary::kMul, a, b); }

Tensor Scale(const Tensor& a, double factor) {
  return Unary(
      OpKind::kScale, a, [factor](double x) { return x * factor; },
      [factor](double, double) { return factor; });
}

Tensor Relu(const Tensor& x) {
  return Unary(
      OpKind::kRelu, x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor Tanh(const Tensor& x) {
  return Unary(
      OpKind::kTanh, x, [](double v) { return std::tanh(v); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor Sigmoid(const Tensor& x) {
  return Unary(
      OpKind::kSigmoid, x,
      [](double v) {
        if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor Abs(const Tensor& x) {
  return Unary(
      OpKind::kAbs, x, [](double v) { return std::fabs(v); },
      [](double v, double) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
}

Tensor Softplus(const Tensor& x) {
  return Unary(
      OpKind::kSoftplus, x,
      [](double v) { return std::max(v, 0.0) + std::log1p(std::exp(-std::fabs(v))); },
      [](double v, double) {
        if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      });
}

Tensor Softmax(const Tensor& x, const AttentionMask* mask) {
  if (x.rank() < 1) ShapeFail(OpKind::kSoftmax, "needs rank >= 1");
  const int64_t cols = x.dim(-1);
  const int64_t rows = cols == 0 ? 0 : x.numel() / cols;
  if (mask && (mask->cols != cols || (mask->rows != rows && mask->rows != 1))) {
    ShapeFail(OpKind::kSoftmax, "mask (" + std::to_string(mask->rows) + ", " +
                                    std::to_string(mask->cols) + ") does not fit input " +
                                    ShapeToString(x.shape()));
  }
  const auto& xv = x.values();
  std::vector<double> out(xv.size(), 0.0);
  for (int64_t r = 0; r < rows; ++r) {
    const double* in = xv.data() + r * cols;
    double* o = out.data() + r * cols;
    double mx = -INFINITY;
    for (int64_t c = 0; c < cols; ++c) {
      if (!mask || mask->at(r, c)) mx = std::max(mx, in[c]);
    }
    if (mx == -INFINITY) {
      throw ContractError("softmax row " + std::to_string(r) +
                          " has no attendable position");
    }
    double z = 0.0;
    for (int64_t c = 0; c < cols; ++c) {
      if (!mask || mask->at(r, c)) {
        o[c] = std::exp(in[c] - mx);
        z += o[c];
      }
    }
    const double inv = 1.0 / z;
    for (int64_t c = 0; c < cols; ++c) o[c] *= inv;
  }
  auto result = MakeResult(OpKind::kSoftmax, x.shape(), std::move(out), {x}, nullptr);
  if (result.requires_grad()) {
    Node* self = result.node().get();
    self->backward = [self, rows, cols](const std::vector<double>& g,
                                        std::span<std::vector<double>* const> grads) {
      auto& gx = *grads[0];
      const auto& y = self->value;
      for (int64_t r = 0; r < rows; ++r) {
        double dot = 0.0;
        for (int64_t c = 0; c < cols; ++c) dot += g[r * cols + c] * y[r * cols + c];
        for (int64_t c = 0; c < cols; ++c) {
          gx[r * cols + c] += y[r * cols + c] * (g[r * cols + c] - dot);
        }
      }
    };
  }
  return result;
}

Tensor LogSoftmax(const Tensor& x) {
  if (x.rank() < 1) ShapeFail(OpKind::kLogSoftmax, "needs rank >= 1");
  const int64_t cols = x.dim(-1);
  const int64_t rows = cols == 0 ? 0 : x.numel() / cols;
  const auto& xv = x.values();
  std::vector<double> out(xv.size());
  for (int64_t r = 0; r < rows; ++r) {
    const double* in = xv.data() + r * cols;
    double mx = -INFINITY;
    for (int64_t c = 0; c < cols; ++c) mx = std::max(mx, in[c]);
    double z = 0.0;
    for (int64_t c = 0; c < cols; ++c) z += std::exp(in[c] - mx);
    const double lse = mx + std::log(z);
    for (int64_t c = 0; c < cols; ++c) out[r * cols + c] = in[c] - lse;
  }
  auto result = MakeResult(OpKind::kLogSoftmax, x.shape(), std::move(out), {x}, nullptr);
  if (result.requires_grad()) {
    Node* self = result.node().get();
    self->backward = [self, rows, cols](const std::vector<double>& g,
                                        std::span<std::vector<double>* const> grads) {
      auto& gx = *grads[0];
      const auto& y = self->value;
      for (int64_t r = 0; r < rows; ++r) {
        double gsum = 0.0;
        for (int64_t c = 0; c < cols; ++c) gsum += g[r * cols + c];
        for (int64_t c = 0; c < cols; ++c) {
          gx[r * cols + c] += g[r * cols + c] - std::exp(y[r * cols + c]) * gsum;
        }
      }
    };
  }
  return result;
}

Tensor LayerNorm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
  if (x.rank() < 1) ShapeFail(OpKind::kLayerNorm, "needs rank >= 1");
  const int64_t cols = x.dim(-1);
  if (gain.shape() != Shape{cols} || bias.shape() != Shape{cols}) {
    ShapeFail(OpKind::kLayerNorm, "gain/bias " + ShapeToString(gain.shape()) + "/" +
                                      ShapeToString(bias.shape()) + " do not match last dim " +
                                      std::to_string(cols));
  }
  const int64_t rows = cols == 0 ? 0 : x.numel() / cols;
  const auto& xv = x.values();
  const auto& gv = gain.values();
  const auto& bv = bias.values();
  std::vector<double> out(xv.size());
  std::vector<double> xhat(xv.size());
  std::vector<double> rstd(rows);
  for (int64_t r = 0; r < rows; ++r) {
    const double* in = xv.data() + r * cols;
    double mean = 0.0;
    for (int64_t c = 0; c < cols; ++c) mean += in[c];
    mean /= cols;
    double var = 0.0;
    for (int64_t c = 0; c < cols; ++c) var += (in[c] - mean) * (in[c] - mean);
    var /= cols;
    rstd[r] = 1.0 / std::sqrt(var + eps);
    for (int64_t c = 0; c < cols; ++c) {
      const double h = (in[c] - mean) * rstd[r];
      xhat[r * cols + c] = h;
      out[r * cols + c] = h * gv[c] + bv[c];
    }
  }
  NodePtr gn = gain.node();
  return MakeResult(
      OpKind::kLayerNorm, x.shape(), std::move(out), {x, gain, bias},
      [gn, rows, cols, xhat = std::move(xhat), rstd = std::move(rstd)](
          const std::vector<double>& g, std::span<std::vector<double>* const> grads) {
        const auto& gv = gn->value;
        std::vector<double> dxhat(cols);
        for (int64_t r = 0; r < rows; ++r) {
          const double* gr = g.data() + r * cols;
          const double* hr = xhat.data() + r * cols;
          if (grads[1]) {
            for (int64_t c = 0; c < cols; ++c) (*grads[1])[c] += gr[c] * hr[c];
          }
          if (grads[2]) {
            for (int64_t c = 0; c < cols; ++c) (*grads[2])[c] += gr[c];
          }
          if (grads[0]) {
            double sum = 0.0, sum_h = 0.0;
            for (int64_t c = 0; c < cols; ++c) {
              dxhat[c] = gr[c] * gv[c];
              sum += dxhat[c];
              sum_h += dxhat[c] * hr[c];
            }
            double* gx = grads[0]->data() + r * cols;
            const double k = rstd[r] / cols;
            for (int64_t c = 0; c < cols; ++c) {
              gx[c] += k * (cols * dxhat[c] - sum - hr[c] * sum_h);
            }
          }
        }
      });
}

Tensor Dropout(const Tensor& x, double p, Rng* rng, bool training) {
  if (p < 0.0 || p >= 1.0) throw InvalidArgumentError("dropout rate must be in [0, 1)");
  if (!training || p == 0.0) return x;
  if (!rng) throw ContractError("dropout in training mode needs an rng");
  const double keep_scale = 1.0 / (1.0 - p);
  std::vector<double> mask(x.numel());
  for (auto& m : mask) m = rng->Uniform() < p ? 0.0 : keep_scale;
  const auto& xv = x.values();
  std::vector<double> out(xv.size());
  for (size_t i = 0; i < xv.size(); ++i) out[i] = xv[i] * mask[i];
  return MakeResult(OpKind::kDropout, x.shape(), std::move(out), {x},
                    [mask = std::move(mask)](const std::vector<double>& g,
                                             std::span<std::vector<double>* const> grads) {
                      auto& gx = *grads[0];
                      for (size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * mask[i];
                    });
}

Tensor EmbeddingLookup(const Tensor& table, std::span<const int64_t> ids) {
  if (table.rank() != 2) ShapeFail(OpKind::kEmbeddingLookup, "table must be a matrix");
  const int64_t vocab = table.dim(0), d = table.dim(1);
  std::vector<int64_t> idv(ids.begin(), ids.end());
  for (int64_t id : idv) {
    if (id < 0 || id >= vocab) {
      throw VocabError("id " + std::to_string(id) + " outside vocabulary of size " +
                       std::to_string(vocab));
    }
  }
  const int64_t n = static_cast<int64_t>(idv.size());
  std::vector<double> out(n * d);
  const auto& tv = table.values();
  for (int64_t i = 0; i < n; ++i) {
    std::copy_n(tv.data() + idv[i] * d, d, out.data() + i * d);
  }
  return MakeResult(OpKind::kEmbeddingLookup, {n, d}, std::move(out), {table},
                    [idv = std::move(idv), d](const std::vector<double>& g,
                                              std::span<std::vector<double>* const> grads) {
                      auto& gt = *grads[0];
                      for (size_t i = 0; i < idv.size(); ++i) {
                        for (int64_t c = 0; c < d; ++c) gt[idv[i] * d + c] += g[i * d + c];
                      }
                    });
}

namespace {

struct ConvGeometry {
  int64_t cin, h, w, cout, kh, kw, sh, sw, ho, wo, pad_top, pad_left;
  int64_t patch() const { return cin * kh * kw; }
};

int64_t SamePadBefore(int64_t in, int64_t out, int64_t kernel, int64_t stride) {
  const int64_t total = std::max<int64_t>((out - 1) * stride + kernel - in, 0);
  return total / 2;
}

// cols: (cin*kh*kw) x (ho*wo)
void Im2Col(const ConvGeometry& g, const double* x, double* cols) {
  const int64_t n = g.ho * g.wo;
  for (int64_t c = 0; c < g.cin; ++c) {
    for (int64_t i = 0; i < g.kh; ++i) {
      for (int64_t j = 0; j < g.kw; ++j) {
        double* row = cols + ((c * g.kh + i) * g.kw + j) * n;
        for (int64_t oy = 0; oy < g.ho; ++oy) {
          const int64_t y = oy * g.sh + i - g.pad_top;
          for (int64_t ox = 0; ox < g.wo; ++ox) {
            const int64_t xx = ox * g.sw + j - g.pad_left;
            row[oy * g.wo + ox] =
                (y >= 0 && y < g.h && xx >= 0 && xx < g.w) ? x[(c * g.h + y) * g.w + xx] : 0.0;
          }
        }
      }
    }
  }
}

void Col2ImAdd(const ConvGeometry& g, const double* cols, double* x) {
  const int64_t n = g.ho * g.wo;
  for (int64_t c = 0; c < g.cin; ++c) {
    for (int64_t i = 0; i < g.kh; ++i) {
      for (int64_t j = 0; j < g.kw; ++j) {
        const double* row = cols + ((c * g.kh + i) * g.kw + j) * n;
        for (int64_t oy = 0; oy < g.ho; ++oy) {
          const int64_t y = oy * g.sh + i - g.pad_top;
          if (y < 0 || y >= g.h) continue;
          for (int64_t ox = 0; ox < g.wo; ++ox) {
            const int64_t xx = ox * g.sw + j - g.pad_left;
            if (xx >= 0 && xx < g.w) x[(c * g.h + y) * g.w + xx] += row[oy * g.wo + ox];
          }
        }
      }
    }
  }
}

}  // namespace

Tensor Conv2d(const Tensor& x, const Tensor& weight, const Tensor& bias,
              const Conv2dOptions& options) {
  if (x.rank() != 3 || weight.rank() != 4 || weight.dim(1) != x.dim(0)) {
    ShapeFail(OpKind::kConv2d, "input " + ShapeToString(x.shape()) + " vs weight " +
                                   ShapeToString(weight.shape()));
  }
  if (options.stride_h < 1 || options.stride_w < 1) {
    ShapeFail(OpKind::kConv2d, "strides must be positive");
  }
  const bool has_bias = bias.defined();
  if (has_bias && bias.shape() != Shape{weight.dim(0)}) {
    ShapeFail(OpKind::kConv2d, "bias " + ShapeToString(bias.shape()) +
                                   " does not match output channels");
  }
  ConvGeometry g{};
  g.cin = x.dim(0);
  g.h = x.dim(1);
  g.w = x.dim(2);
  g.cout = weight.dim(0);
  g.kh = weight.dim(2);
  g.kw = weight.dim(3);
  g.sh = options.stride_h;
  g.sw = options.stride_w;
  g.ho = ConvOutputExtent(g.h, g.kh, g.sh, options.padding);
  g.wo = ConvOutputExtent(g.w, g.kw, g.sw, options.padding);
  if (options.padding == Padding::kValid && (g.h < g.kh || g.w < g.kw)) {
    ShapeFail(OpKind::kConv2d, "valid padding needs input at least kernel size, got " +
                                   ShapeToString(x.shape()));
  }
  g.pad_top = options.padding == Padding::kSame ? SamePadBefore(g.h, g.ho, g.kh, g.sh) : 0;
  g.pad_left = options.padding == Padding::kSame ? SamePadBefore(g.w, g.wo, g.kw, g.sw) : 0;

  const int64_t n = g.ho * g.wo;
  std::vector<double> cols(g.patch() * n);
  Im2Col(g, x.data().data(), cols.data());
  std::vector<double> out(g.cout * n, 0.0);
  if (n > 0) {
    MatMap om(out.data(), g.cout, n);
    om.noalias() = ConstMatMap(weight.data().data(), g.cout, g.patch()) *
                   ConstMatMap(cols.data(), g.patch(), n);
    if (has_bias) {
      const auto& bv = bias.values();
      for (int64_t c = 0; c < g.cout; ++c) om.row(c).array() += bv[c];
    }
  }
  std::vector<Tensor> inputs = {x, weight};
  if (has_bias) inputs.push_back(bias);
  NodePtr wn = weight.node();
  return MakeResult(
      OpKind::kConv2d, {g.cout, g.ho, g.wo}, std::move(out), std::move(inputs),
      [wn, g, n, has_bias, cols = std::move(cols)](
          const std::vector<double>& grad, std::span<std::vector<double>* const> grads) {
        if (n == 0) return;
        ConstMatMap gm(grad.data(), g.cout, n);
        if (grads[1]) {
          MatMap(grads[1]->data(), g.cout, g.patch()).noalias() +=
              gm * ConstMatMap(cols.data(), g.patch(), n).transpose();
        }
        if (has_bias && grads[2]) {
          auto& gb = *grads[2];
          for (int64_t c = 0; c < g.cout; ++c) gb[c] += gm.row(c).sum();
        }
        if (grads[0]) {
          std::vector<double> dcols(g.patch() * n);
          MatMap(dcols.data(), g.patch(), n).noalias() =
              ConstMatMap(wn->value.data(), g.cout, g.patch()).transpose() * gm;
          Col2ImAdd(g, dcols.data(), grads[0]->data());
        }
      });
}

Tensor Reshape(const Tensor& x, Shape shape) {
  if (NumElements(shape) != x.numel()) {
    ShapeFail(OpKind::kReshape, "cannot view " + ShapeToString(x.shape()) + " as " +
                                    ShapeToString(shape));
  }
  return MakeResult(OpKind::kReshape, std::move(shape), x.values(), {x},
                    [](const std::vector<double>& g, std::span<std::vector<double>* const> grads) {
                      auto& gx = *grads[0];
                      for (size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
                    });
}

Tensor Concat(std::span<const Tensor> parts, int64_t axis) {
  if (parts.empty()) ShapeFail(OpKind::kConcat, "no inputs");
  const int64_t rank = parts[0].rank();
  axis = NormalizeAxis(axis, rank, OpKind::kConcat);
  Shape out_shape = parts[0].shape();
  out_shape[axis] = 0;
  std::vector<int64_t> extents;
  for (const Tensor& p : parts) {
    if (p.rank() != rank) ShapeFail(OpKind::kConcat, "rank mismatch");
    for (int64_t d = 0; d < rank; ++d) {
      if (d != axis && p.dim(d) != parts[0].dim(d)) {
        ShapeFail(OpKind::kConcat, "extent mismatch on axis " + std::to_string(d) + ": " +
                                       ShapeToString(p.shape()) + " vs " +
                                       ShapeToString(parts[0].shape()));
      }
    }
    extents.push_back(p.dim(axis));
    out_shape[axis] += p.dim(axis);
  }
  int64_t outer = 1, inner = 1;
  for (int64_t d = 0; d < axis; ++d) outer *= out_shape[d];
  for (int64_t d = axis + 1; d < rank; ++d) inner *= out_shape[d];
  const int64_t total = out_shape[axis];
  std::vector<double> out(NumElements(out_shape));
  int64_t offset = 0;
  for (size_t k = 0; k < parts.size(); ++k) {
    const auto& pv = parts[k].values();
    const int64_t chunk = extents[k] * inner;
    for (int64_t o = 0; o < outer; ++o) {
      std::copy_n(pv.data() + o * chunk, chunk, out.data() + (o * total + offset) * inner);
    }
    offset += extents[k];
  }
  return MakeResult(
      OpKind::kConcat, std::move(out_shape), std::move(out),
      std::vector<Tensor>(parts.begin(), parts.end()),
      [extents, outer, inner, total](const std::vector<double>& g,
                                     std::span<std::vector<double>* const> grads) {
        int64_t offset = 0;
        for (size_t k = 0; k < extents.size(); ++k) {
          const int64_t chunk = extents[k] * inner;
          if (grads[k]) {
            auto& gk = *grads[k];
            for (int64_t o = 0; o < outer; ++o) {
              const double* src = g.data() + (o * total + offset) * inner;
              for (int64_t i = 0; i < chunk; ++i) gk[o * chunk + i] += src[i];
            }
          }
          offset += extents[k];
        }
      });
}

Tensor Slice(const Tensor& x, int64_t axis, int64_t start, int64_t end) {
  axis = NormalizeAxis(axis, x.rank(), OpKind::kSlice);
  const int64_t extent = x.dim(axis);
  if (start < 0 || end > extent || start > end) {
    ShapeFail(OpKind::kSlice, "range [" + std::to_string(start) + ", " + std::to_string(end) +
                                  ") invalid for extent " + std::to_string(extent));
  }
  Shape out_shape = x.shape();
  out_shape[axis] = end - start;
  int64_t outer = 1, inner = 1;
  for (int64_t d = 0; d < axis; ++d) outer *= out_shape[d];
  for (int64_t d = axis + 1; d < x.rank(); ++d) inner *= out_shape[d];
  const int64_t chunk = (end - start) * inner;
  std::vector<double> out(outer * chunk);
  const auto& xv = x.values();
  for (int64_t o = 0; o < outer; ++o) {
    std::copy_n(xv.data() + (o * extent + start) * inner, chunk, out.data() + o * chunk);
  }
  return MakeResult(OpKind::kSlice, std::move(out_shape), std::move(out), {x},
                    [outer, inner, chunk, extent, start](
                        const std::vector<double>& g, std::span<std::vector<double>* const> grads) {
                      auto& gx = *grads[0];
                      for (int64_t o = 0; o < outer; ++o) {
                        double* dst = gx.data() + (o * extent + start) * inner;
                        for (int64_t i = 0; i < chunk; ++i) dst[i] += g[o * chunk + i];
                      }
                    });
}

Tensor Permute(const Tensor& x, std::span<const int64_t> perm) {
  const int64_t rank = x.rank();
  if (static_cast<int64_t>(perm.size()) != rank) {
    ShapeFail(OpKind::kTranspose, "permutation size does not match rank");
  }
  std::vector<int64_t> seen(rank, 0);
  for (int64_t p : perm) {
    if (p < 0 || p >= rank || seen[p]++) ShapeFail(OpKind::kTranspose, "invalid permutation");
  }
  Shape out_shape(rank);
  std::vector<int64_t> in_strides(rank, 1);
  for (int64_t d = rank - 2; d >= 0; --d) in_strides[d] = in_strides[d + 1] * x.dim(d + 1);
  for (int64_t d = 0; d < rank; ++d) out_shape[d] = x.dim(perm[d]);
  // src_index[i] maps output flat index i to input flat index.
  const int64_t n = x.numel();
  std::vector<int64_t> src_index(n);
  std::vector<int64_t> counter(rank, 0);
  for (int64_t i = 0; i < n; ++i) {
    int64_t src = 0;
    for (int64_t d = 0; d < rank; ++d) src += counter[d] * in_strides[perm[d]];
    src_index[i] = src;
    for (int64_t d = rank - 1; d >= 0; --d) {
      if (++counter[d] < out_shape[d]) break;
      counter[d] = 0;
    }
  }
  const auto& xv = x.values();
  std::vector<double> out(n);
  for (int64_t i = 0; i < n; ++i) out[i] = xv[src_index[i]];
  return MakeResult(OpKind::kTranspose, std::move(out_shape), std::move(out), {x},
                    [src_index = std::move(src_index)](
                        const std::vector<double>& g, std::span<std::vector<double>* const> grads) {
                      auto& gx = *grads[0];
                      for (size_t i = 0; i < g.size(); ++i) gx[src_index[i]] += g[i];
                    });
}

Tensor Transpose(const Tensor& x) {
  if (x.rank() != 2) ShapeFail(OpKind::kTranspose, "matrix transpose needs rank 2");
  const int64_t perm[2] = {1, 0};
  return Permute(x, perm);
}

Tensor Sum(const Tensor& x) {
  double s = 0.0;
  for (double v : x.values()) s += v;
  return MakeResult(OpKind::kSum, {}, {s}, {x},
                    [](const std::vector<double>& g, std::span<std::vector<double>* const> grads) {
                      for (double& v : *grads[0]) v += g[0];
                    });
}

Tensor Mean(const Tensor& x) {
  if (x.numel() == 0) throw ShapeError("mean: empty input");
  const double n = static_cast<double>(x.numel());
  double s = 0.0;
  for (double v : x.values()) s += v;
  return MakeResult(OpKind::kMean, {}, {s / n}, {x},
                    [n](const std::vector<double>& g, std::span<std::vector<double>* const> grads) {
                      for (double& v : *grads[0]) v += g[0] / n;
                    });
}

Tensor ForwardPrimitive(OpKind kind, std::span<const Tensor> in, const PrimitiveAttrs& a) {
  auto need = [&](size_t n) {
    if (in.size() != n) {
      ShapeFail(kind, "expects " + std::to_string(n) + " inputs, got " + std::to_string(in.size()));
    }
  };
  switch (kind) {
    case OpKind::kMatMul: need(2); return MatMul(in[0], in[1]);
    case OpKind::kAdd: need(2); return Add(in[0], in[1]);
    case OpKind::kSub: need(2); return Sub(in[0], in[1]);
    case OpKind::kMul: need(2); return Mul(in[0], in[1]);
    case OpKind::kScale: need(1); return Scale(in[0], a.factor);
    case OpKind::kRelu: need(1); return Relu(in[0]);
    case OpKind::kTanh: need(1); return Tanh(in[0]);
    case OpKind::kSigmoid: need(1); return Sigmoid(in[0]);
    case OpKind::kAbs: need(1); return Abs(in[0]);
    case OpKind::kSoftplus: need(1); return Softplus(in[0]);
    case OpKind::kSoftmax: need(1); return Softmax(in[0], a.mask);
    case OpKind::kLogSoftmax: need(1); return LogSoftmax(in[0]);
    case OpKind::kLayerNorm: need(3); return LayerNorm(in[0], in[1], in[2], a.eps);
    case OpKind::kDropout: need(1); return Dropout(in[0], a.p, a.rng, a.training);
    case OpKind::kEmbeddingLookup: need(1); return EmbeddingLookup(in[0], a.ids);
    case OpKind::kConv2d:
      if (in.size() == 2) return Conv2d(in[0], in[1], Tensor(), a.conv);
      need(3);
      return Conv2d(in[0], in[1], in[2], a.conv);
    case OpKind::kReshape: need(1); return Reshape(in[0], a.shape);
    case OpKind::kConcat: return Concat(in, a.axis);
    case OpKind::kSlice: need(1); return Slice(in[0], a.axis, a.start, a.end);
    case OpKind::kTranspose:
      need(1);
      return a.perm.empty() ? Transpose(in[0]) : Permute(in[0], a.perm);
    case OpKind::kMean: need(1); return Mean(in[0]);
    case OpKind::kSum: need(1); return Sum(in[0]);
    case OpKind::kLeaf: break;
  }
  throw ContractError("leaf is not a primitive");
}

}  // namespace s2st::nd
