// Copyright 2026 The seqrec Authors.
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

#include "seqrec/ad/ops.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstring>

namespace seqrec {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;

void check_finite(const char* op, const Tensor& t) {
  for (double v : t.data()) {
    if (!std::isfinite(v)) {
      throw NumericError(std::string("non-finite value produced by ") + op);
    }
  }
}

bool wants_grad(std::initializer_list<const Tensor*> inputs) {
  if (active_tape() == nullptr) return false;
  for (const Tensor* t : inputs) {
    if (t->requires_grad()) return true;
  }
  return false;
}

std::int64_t numel_of(const std::vector<std::int64_t>& shape) {
  std::int64_t n = 1;
  for (std::int64_t d : shape) n *= d;
  return n;
}

// Right-aligned broadcast of b onto a's shape: per a-axis stride into b's
// buffer (0 where b broadcasts). Throws when shapes are incompatible.
std::vector<std::int64_t> broadcast_strides(const std::vector<std::int64_t>& a,
                                            const std::vector<std::int64_t>& b,
                                            const char* op) {
  require_numeric(b.size() <= a.size(),
                  std::string(op) + ": broadcast operand has higher rank");
  int ra = static_cast<int>(a.size());
  int rb = static_cast<int>(b.size());
  std::vector<std::int64_t> b_strides_native(rb);
  std::int64_t s = 1;
  for (int i = rb - 1; i >= 0; --i) {
    b_strides_native[i] = s;
    s *= b[i];
  }
  std::vector<std::int64_t> strides(ra, 0);
  for (int i = 0; i < rb; ++i) {
    std::int64_t ad = a[ra - 1 - i];
    std::int64_t bd = b[rb - 1 - i];
    require_numeric(bd == ad || bd == 1,
                    std::string(op) + ": shapes are not broadcast-compatible");
    strides[ra - 1 - i] = (bd == 1) ? 0 : b_strides_native[rb - 1 - i];
  }
  return strides;
}

// Calls f(a_flat_index, b_flat_index) for every element of shape `a`,
// walking b's buffer through the given per-axis strides.
template <class F>
void for_each_broadcast(const std::vector<std::int64_t>& a,
                        const std::vector<std::int64_t>& b_strides, F&& f) {
  int r = static_cast<int>(a.size());
  std::int64_t n = numel_of(a);
  std::vector<std::int64_t> idx(static_cast<std::size_t>(r), 0);
  std::int64_t bi = 0;
  for (std::int64_t ai = 0; ai < n; ++ai) {
    f(ai, bi);
    for (int k = r - 1; k >= 0; --k) {
      ++idx[static_cast<std::size_t>(k)];
      bi += b_strides[static_cast<std::size_t>(k)];
      if (idx[static_cast<std::size_t>(k)] < a[static_cast<std::size_t>(k)]) break;
      bi -= b_strides[static_cast<std::size_t>(k)] * a[static_cast<std::size_t>(k)];
      idx[static_cast<std::size_t>(k)] = 0;
    }
  }
}

bool is_suffix_broadcast(const std::vector<std::int64_t>& a,
                         const std::vector<std::int64_t>& b) {
  if (b.size() > a.size()) return false;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[b.size() - 1 - i] != a[a.size() - 1 - i]) return false;
  }
  return true;
}

template <class Fwd>
Tensor elementwise_broadcast(const char* op, const Tensor& a, const Tensor& b,
                             Fwd&& fwd, bool is_add) {
  const auto& as = a.shape();
  const auto& bs = b.shape();
  Tensor out = Tensor::zeros(as);
  auto& ov = out.data();
  const auto& av = a.data();
  const auto& bv = b.data();

  if (is_suffix_broadcast(as, bs)) {
    std::int64_t bn = b.numel();
    if (bn == 0) {
      require_numeric(a.numel() == 0, std::string(op) + ": empty operand");
    } else {
      for (std::int64_t i = 0; i < a.numel(); ++i) {
        ov[static_cast<std::size_t>(i)] = fwd(av[static_cast<std::size_t>(i)],
                                              bv[static_cast<std::size_t>(i % bn)]);
      }
    }
  } else {
    auto strides = broadcast_strides(as, bs, op);
    for_each_broadcast(as, strides, [&](std::int64_t ai, std::int64_t bi) {
      ov[static_cast<std::size_t>(ai)] =
          fwd(av[static_cast<std::size_t>(ai)], bv[static_cast<std::size_t>(bi)]);
    });
  }
  check_finite(op, out);

  if (wants_grad({&a, &b})) {
    out.set_requires_grad(true);
    Tensor ac = a, bc = b, oc = out;
    active_tape()->record([ac, bc, oc, is_add]() mutable {
      const auto& g = oc.grad();
      auto strides = broadcast_strides(ac.shape(), bc.shape(), "elementwise");
      auto& ga = ac.grad();
      auto& gb = bc.grad();
      const auto& av2 = ac.data();
      const auto& bv2 = bc.data();
      for_each_broadcast(ac.shape(), strides, [&](std::int64_t ai, std::int64_t bi) {
        double gv = g[static_cast<std::size_t>(ai)];
        if (is_add) {
          ga[static_cast<std::size_t>(ai)] += gv;
          gb[static_cast<std::size_t>(bi)] += gv;
        } else {
          ga[static_cast<std::size_t>(ai)] += gv * bv2[static_cast<std::size_t>(bi)];
          gb[static_cast<std::size_t>(bi)] += gv * av2[static_cast<std::size_t>(ai)];
        }
      });
    });
  }
  return out;
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_numeric(a.rank() == b.rank() && (a.rank() == 2 || a.rank() == 3),
                  "matmul: operands must both be rank 2 or rank 3");
  std::int64_t batches = a.rank() == 3 ? a.dim(0) : 1;
  if (a.rank() == 3) {
    require_numeric(a.dim(0) == b.dim(0), "matmul: batch dimensions differ");
  }
  std::int64_t m = a.dim(a.rank() - 2);
  std::int64_t k = a.dim(a.rank() - 1);
  std::int64_t k2 = b.dim(b.rank() - 2);
  std::int64_t n = b.dim(b.rank() - 1);
  require_numeric(k == k2, "matmul: inner dimensions differ");

  std::vector<std::int64_t> out_shape =
      a.rank() == 3 ? std::vector<std::int64_t>{batches, m, n}
                    : std::vector<std::int64_t>{m, n};
  Tensor out = Tensor::zeros(out_shape);
  for (std::int64_t bidx = 0; bidx < batches; ++bidx) {
    ConstMatMap ma(a.data().data() + bidx * m * k, m, k);
    ConstMatMap mb(b.data().data() + bidx * k * n, k, n);
    MatMap mo(out.data().data() + bidx * m * n, m, n);
    mo.noalias() = ma * mb;
  }
  check_finite("matmul", out);

  if (wants_grad({&a, &b})) {
    out.set_requires_grad(true);
    Tensor ac = a, bc = b, oc = out;
    active_tape()->record([ac, bc, oc, batches, m, k, n]() mutable {
      bool need_a = ac.requires_grad();
      bool need_b = bc.requires_grad();
      for (std::int64_t bidx = 0; bidx < batches; ++bidx) {
        ConstMatMap mg(oc.grad().data() + bidx * m * n, m, n);
        if (need_a) {
          ConstMatMap mb(bc.data().data() + bidx * k * n, k, n);
          MatMap mga(ac.grad().data() + bidx * m * k, m, k);
          mga.noalias() += mg * mb.transpose();
        }
        if (need_b) {
          ConstMatMap ma(ac.data().data() + bidx * m * k, m, k);
          MatMap mgb(bc.grad().data() + bidx * k * n, k, n);
          mgb.noalias() += ma.transpose() * mg;
        }
      }
    });
  }
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  return elementwise_broadcast("add", a, b, [](double x, double y) { return x + y; },
                               /*is_add=*/true);
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return elementwise_broadcast("mul", a, b, [](double x, double y) { return x * y; },
                               /*is_add=*/false);
}

Tensor add(const Tensor& a, double c) {
  Tensor out = Tensor::zeros(a.shape());
  for (std::int64_t i = 0; i < a.numel(); ++i) {
    out.data()[static_cast<std::size_t>(i)] = a.data()[static_cast<std::size_t>(i)] + c;
  }
  check_finite("add_scalar", out);
  if (wants_grad({&a})) {
    out.set_requires_grad(true);
    Tensor ac = a, oc = out;
    active_tape()->record([ac, oc]() mutable {
      auto& ga = ac.grad();
      const auto& g = oc.grad();
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i];
    });
  }
  return out;
}

Tensor mul(const Tensor& a, double c) {
  Tensor out = Tensor::zeros(a.shape());
  for (std::int64_t i = 0; i < a.numel(); ++i) {
    out.data()[static_cast<std::size_t>(i)] = a.data()[static_cast<std::size_t>(i)] * c;
  }
  check_finite("mul_scalar", out);
  if (wants_grad({&a})) {
    out.set_requires_grad(true);
    Tensor ac = a, oc = out;
    active_tape()->record([ac, oc, c]() mutable {
      auto& ga = ac.grad();
      const auto& g = oc.grad();
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * c;
    });
  }
  return out;
}

Tensor neg(const Tensor& a) { return mul(a, -1.0); }

Tensor sub(const Tensor& a, const Tensor& b) { return add(a, neg(b)); }

Tensor concat(std::span<const Tensor> parts, int axis) {
  require_numeric(!parts.empty(), "concat: no operands");
  int rank = parts[0].rank();
  require_numeric(axis >= 0 && axis < rank, "concat: axis out of range");
  std::vector<std::int64_t> out_shape = parts[0].shape();
  out_shape[static_cast<std::size_t>(axis)] = 0;
  for (const Tensor& p : parts) {
    require_numeric(p.rank() == rank, "concat: rank mismatch");
    for (int i = 0; i < rank; ++i) {
      if (i == axis) continue;
      require_numeric(p.dim(i) == parts[0].dim(i), "concat: shape mismatch");
    }
    out_shape[static_cast<std::size_t>(axis)] += p.dim(axis);
  }

  std::int64_t outer = 1;
  for (int i = 0; i < axis; ++i) outer *= out_shape[static_cast<std::size_t>(i)];
  std::int64_t inner = 1;
  for (int i = axis + 1; i < rank; ++i) inner *= out_shape[static_cast<std::size_t>(i)];
  std::int64_t total_axis = out_shape[static_cast<std::size_t>(axis)];

  Tensor out = Tensor::zeros(out_shape);
  std::int64_t off = 0;
  for (const Tensor& p : parts) {
    std::int64_t la = p.dim(axis);
    for (std::int64_t o = 0; o < outer; ++o) {
      std::memcpy(out.data().data() + (o * total_axis + off) * inner,
                  p.data().data() + o * la * inner,
                  static_cast<std::size_t>(la * inner) * sizeof(double));
    }
    off += la;
  }
  check_finite("concat", out);

  bool any = false;
  for (const Tensor& p : parts) any = any || p.requires_grad();
  if (active_tape() != nullptr && any) {
    out.set_requires_grad(true);
    std::vector<Tensor> pc(parts.begin(), parts.end());
    Tensor oc = out;
    active_tape()->record([pc, oc, axis, outer, inner, total_axis]() mutable {
      const auto& g = oc.grad();
      std::int64_t off2 = 0;
      for (Tensor& p : pc) {
        std::int64_t la = p.dim(axis);
        if (p.requires_grad()) {
          auto& gp = p.grad();
          for (std::int64_t o = 0; o < outer; ++o) {
            const double* src = g.data() + (o * total_axis + off2) * inner;
            double* dst = gp.data() + o * la * inner;
            for (std::int64_t i = 0; i < la * inner; ++i) dst[i] += src[i];
          }
        }
        off2 += la;
      }
    });
  }
  return out;
}

Tensor slice(const Tensor& a, int axis, std::int64_t start, std::int64_t len) {
  int rank = a.rank();
  require_numeric(axis >= 0 && axis < rank, "slice: axis out of range");
  require_numeric(start >= 0 && len >= 0 && start + len <= a.dim(axis),
                  "slice: range out of bounds");
  std::vector<std::int64_t> out_shape = a.shape();
  out_shape[static_cast<std::size_t>(axis)] = len;

  std::int64_t outer = 1;
  for (int i = 0; i < axis; ++i) outer *= a.dim(i);
  std::int64_t inner = 1;
  for (int i = axis + 1; i < rank; ++i) inner *= a.dim(i);
  std::int64_t la = a.dim(axis);

  Tensor out = Tensor::zeros(out_shape);
  for (std::int64_t o = 0; o < outer; ++o) {
    std::memcpy(out.data().data() + o * len * inner,
                a.data().data() + (o * la + start) * inner,
                static_cast<std::size_t>(len * inner) * sizeof(double));
  }
  check_finite("slice", out);

  if (wants_grad({&a})) {
    out.set_requires_grad(true);
    Tensor ac = a, oc = out;
    active_tape()->record([ac, oc, outer, inner, la, len, start]() mutable {
      const auto& g = oc.grad();
      auto& ga = ac.grad();
      for (std::int64_t o = 0; o < outer; ++o) {
        const double* src = g.data() + o * len * inner;
        double* dst = ga.data() + (o * la + start) * inner;
        for (std::int64_t i = 0; i < len * inner; ++i) dst[i] += src[i];
      }
    });
  }
  return out;
}

Tensor embedding_gather(const Tensor& table, std::span<const std::int32_t> ids) {
  require_numeric(table.rank() == 2, "embedding_gather: table must be rank 2");
  std::int64_t v = table.dim(0);
  std::int64_t d = table.dim(1);
  std::int64_t n = static_cast<std::int64_t>(ids.size());
  Tensor out = Tensor::zeros({n, d});
  for (std::int64_t i = 0; i < n; ++i) {
    std::int32_t row = ids[static_cast<std::size_t>(i)];
    require_numeric(row >= 0 && row < v, "embedding_gather: id out of range");
    std::memcpy(out.data().data() + i * d, table.data().data() + row * d,
                static_cast<std::size_t>(d) * sizeof(double));
  }
  check_finite("embedding_gather", out);

  if (wants_grad({&table})) {
    out.set_requires_grad(true);
    Tensor tc = table, oc = out;
    std::vector<std::int32_t> ids_copy(ids.begin(), ids.end());
    active_tape()->record([tc, oc, ids_copy, d]() mutable {
      const auto& g = oc.grad();
      auto& gt = tc.grad();
      for (std::size_t i = 0; i < ids_copy.size(); ++i) {
        double* dst = gt.data() + static_cast<std::int64_t>(ids_copy[i]) * d;
        const double* src = g.data() + static_cast<std::int64_t>(i) * d;
        for (std::int64_t j = 0; j < d; ++j) dst[j] += src[j];
      }
    });
  }
  return out;
}

namespace {

template <class FwdFn, class GradFn>
Tensor pointwise(const char* op, const Tensor& a, FwdFn fwd, GradFn grad_from_xy) {
  Tensor out = Tensor::zeros(a.shape());
  const auto& av = a.data();
  auto& ov = out.data();
  for (std::size_t i = 0; i < av.size(); ++i) ov[i] = fwd(av[i]);
  check_finite(op, out);
  if (wants_grad({&a})) {
    out.set_requires_grad(true);
    Tensor ac = a, oc = out;
    active_tape()->record([ac, oc, grad_from_xy]() mutable {
      auto& ga = ac.grad();
      const auto& g = oc.grad();
      const auto& x = ac.data();
      const auto& y = oc.data();
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * grad_from_xy(x[i], y[i]);
    });
  }
  return out;
}

}  // namespace

Tensor sigmoid(const Tensor& a) {
  return pointwise(
      "sigmoid", a,
      [](double x) {
        return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh(const Tensor& a) {
  return pointwise("tanh", a, [](double x) { return std::tanh(x); },
                   [](double, double y) { return 1.0 - y * y; });
}

Tensor relu(const Tensor& a) {
  return pointwise("relu", a, [](double x) { return x > 0 ? x : 0.0; },
                   [](double x, double) { return x > 0 ? 1.0 : 0.0; });
}

Tensor logsigmoid(const Tensor& a) {
  return pointwise(
      "logsigmoid", a,
      [](double x) {
        // log(sigmoid(x)) = -softplus(-x), stable on both tails.
        return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
      },
      [](double x, double) {
        return x >= 0 ? std::exp(-x) / (1.0 + std::exp(-x)) : 1.0 / (1.0 + std::exp(x));
      });
}

namespace {

// Shared forward for softmax/log_softmax over the last axis.
void softmax_rows(const Tensor& a, std::vector<double>& out, bool log_form) {
  std::int64_t d = a.shape().empty() ? 1 : a.shape().back();
  require_numeric(d > 0, "softmax: empty last axis");
  std::int64_t rows = a.numel() / d;
  const auto& av = a.data();
  for (std::int64_t r = 0; r < rows; ++r) {
    const double* x = av.data() + r * d;
    double* y = out.data() + r * d;
    double mx = x[0];
    for (std::int64_t i = 1; i < d; ++i) mx = std::max(mx, x[i]);
    double z = 0.0;
    for (std::int64_t i = 0; i < d; ++i) z += std::exp(x[i] - mx);
    if (log_form) {
      double lz = std::log(z);
      for (std::int64_t i = 0; i < d; ++i) y[i] = x[i] - mx - lz;
    } else {
      for (std::int64_t i = 0; i < d; ++i) y[i] = std::exp(x[i] - mx) / z;
    }
  }
}

}  // namespace

Tensor softmax(const Tensor& a) {
  Tensor out = Tensor::zeros(a.shape());
  softmax_rows(a, out.data(), /*log_form=*/false);
  check_finite("softmax", out);
  if (wants_grad({&a})) {
    out.set_requires_grad(true);
    Tensor ac = a, oc = out;
    active_tape()->record([ac, oc]() mutable {
      std::int64_t d = oc.shape().empty() ? 1 : oc.shape().back();
      std::int64_t rows = oc.numel() / d;
      auto& ga = ac.grad();
      const auto& g = oc.grad();
      const auto& y = oc.data();
      for (std::int64_t r = 0; r < rows; ++r) {
        double dot = 0.0;
        for (std::int64_t i = 0; i < d; ++i) {
          dot += g[static_cast<std::size_t>(r * d + i)] * y[static_cast<std::size_t>(r * d + i)];
        }
        for (std::int64_t i = 0; i < d; ++i) {
          std::size_t k = static_cast<std::size_t>(r * d + i);
          ga[k] += y[k] * (g[k] - dot);
        }
      }
    });
  }
  return out;
}

Tensor log_softmax(const Tensor& a) {
  Tensor out = Tensor::zeros(a.shape());
  softmax_rows(a, out.data(), /*log_form=*/true);
  check_finite("log_softmax", out);
  if (wants_grad({&a})) {
    out.set_requires_grad(true);
    Tensor ac = a, oc = out;
    active_tape()->record([ac, oc]() mutable {
      std::int64_t d = oc.shape().empty() ? 1 : oc.shape().back();
      std::int64_t rows = oc.numel() / d;
      auto& ga = ac.grad();
      const auto& g = oc.grad();
      const auto& y = oc.data();  // log-probabilities
      for (std::int64_t r = 0; r < rows; ++r) {
        double gsum = 0.0;
        for (std::int64_t i = 0; i < d; ++i) gsum += g[static_cast<std::size_t>(r * d + i)];
        for (std::int64_t i = 0; i < d; ++i) {
          std::size_t k = static_cast<std::size_t>(r * d + i);
          ga[k] += g[k] - std::exp(y[k]) * gsum;
        }
      }
    });
  }
  return out;
}

Tensor dropout(const Tensor& a, double p, bool train, Rng& rng) {
  require_numeric(p >= 0.0 && p < 1.0, "dropout: p must be in [0, 1)");
  if (!train || p == 0.0) return a;

  Tensor out = Tensor::zeros(a.shape());
  std::vector<double> scaled_mask(a.data().size());
  double keep_scale = 1.0 / (1.0 - p);
  const auto& av = a.data();
  auto& ov = out.data();
  for (std::size_t i = 0; i < av.size(); ++i) {
    scaled_mask[i] = rng.next_double() < p ? 0.0 : keep_scale;
    ov[i] = av[i] * scaled_mask[i];
  }
  check_finite("dropout", out);
  if (wants_grad({&a})) {
    out.set_requires_grad(true);
    Tensor ac = a, oc = out;
    active_tape()->record([ac, oc, scaled_mask = std::move(scaled_mask)]() mutable {
      auto& ga = ac.grad();
      const auto& g = oc.grad();
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * scaled_mask[i];
    });
  }
  return out;
}

Tensor layer_norm(const Tensor& a, const Tensor& gamma, const Tensor& beta, double eps) {
  std::int64_t d = a.shape().empty() ? 1 : a.shape().back();
  require_numeric(gamma.rank() == 1 && gamma.dim(0) == d, "layer_norm: bad gamma shape");
  require_numeric(beta.rank() == 1 && beta.dim(0) == d, "layer_norm: bad beta shape");
  std::int64_t rows = a.numel() / d;

  Tensor out = Tensor::zeros(a.shape());
  std::vector<double> xhat(a.data().size());
  std::vector<double> inv_std(static_cast<std::size_t>(rows));
  const auto& av = a.data();
  const auto& gv = gamma.data();
  const auto& bv = beta.data();
  auto& ov = out.data();
  for (std::int64_t r = 0; r < rows; ++r) {
    const double* x = av.data() + r * d;
    double m = 0.0;
    for (std::int64_t i = 0; i < d; ++i) m += x[i];
    m /= static_cast<double>(d);
    double var = 0.0;
    for (std::int64_t i = 0; i < d; ++i) var += (x[i] - m) * (x[i] - m);
    var /= static_cast<double>(d);
    double is = 1.0 / std::sqrt(var + eps);
    inv_std[static_cast<std::size_t>(r)] = is;
    for (std::int64_t i = 0; i < d; ++i) {
      double xh = (x[i] - m) * is;
      xhat[static_cast<std::size_t>(r * d + i)] = xh;
      ov[static_cast<std::size_t>(r * d + i)] = gv[static_cast<std::size_t>(i)] * xh +
                                                bv[static_cast<std::size_t>(i)];
    }
  }
  check_finite("layer_norm", out);

  if (wants_grad({&a, &gamma, &beta})) {
    out.set_requires_grad(true);
    Tensor ac = a, gc = gamma, bc = beta, oc = out;
    active_tape()->record([ac, gc, bc, oc, xhat = std::move(xhat),
                           inv_std = std::move(inv_std), d]() mutable {
      std::int64_t rows = oc.numel() / d;
      const auto& g = oc.grad();
      const auto& gammav = gc.data();
      bool need_a = ac.requires_grad();
      bool need_g = gc.requires_grad();
      bool need_b = bc.requires_grad();
      for (std::int64_t r = 0; r < rows; ++r) {
        const double* grow = g.data() + r * d;
        const double* xh = xhat.data() + r * d;
        if (need_g || need_b) {
          for (std::int64_t i = 0; i < d; ++i) {
            if (need_g) gc.grad()[static_cast<std::size_t>(i)] += grow[i] * xh[i];
            if (need_b) bc.grad()[static_cast<std::size_t>(i)] += grow[i];
          }
        }
        if (need_a) {
          double m1 = 0.0, m2 = 0.0;
          for (std::int64_t i = 0; i < d; ++i) {
            double gh = grow[i] * gammav[static_cast<std::size_t>(i)];
            m1 += gh;
            m2 += gh * xh[i];
          }
          m1 /= static_cast<double>(d);
          m2 /= static_cast<double>(d);
          double is = inv_std[static_cast<std::size_t>(r)];
          for (std::int64_t i = 0; i < d; ++i) {
            double gh = grow[i] * gammav[static_cast<std::size_t>(i)];
            ac.grad()[static_cast<std::size_t>(r * d + i)] += (gh - m1 - xh[i] * m2) * is;
          }
        }
      }
    });
  }
  return out;
}

Tensor masked_fill(const Tensor& a, std::span<const std::uint8_t> mask, double fill) {
  require_numeric(static_cast<std::int64_t>(mask.size()) == a.numel(),
                  "masked_fill: mask size mismatch");
  require_numeric(std::isfinite(fill), "masked_fill: fill must be finite");
  Tensor out = Tensor::zeros(a.shape());
  const auto& av = a.data();
  auto& ov = out.data();
  for (std::size_t i = 0; i < av.size(); ++i) ov[i] = mask[i] ? fill : av[i];
  check_finite("masked_fill", out);
  if (wants_grad({&a})) {
    out.set_requires_grad(true);
    Tensor ac = a, oc = out;
    std::vector<std::uint8_t> mask_copy(mask.begin(), mask.end());
    active_tape()->record([ac, oc, mask_copy = std::move(mask_copy)]() mutable {
      auto& ga = ac.grad();
      const auto& g = oc.grad();
      for (std::size_t i = 0; i < ga.size(); ++i) {
        if (!mask_copy[i]) ga[i] += g[i];
      }
    });
  }
  return out;
}

namespace {

// Per-input-axis weight of that axis' index in the transposed output's flat
// offset.
std::vector<std::int64_t> transpose_weights(const std::vector<std::int64_t>& in_shape,
                                            std::span<const int> perm) {
  int r = static_cast<int>(in_shape.size());
  std::vector<std::int64_t> out_shape(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) {
    out_shape[static_cast<std::size_t>(i)] = in_shape[static_cast<std::size_t>(perm[i])];
  }
  std::vector<std::int64_t> out_strides(static_cast<std::size_t>(r));
  std::int64_t s = 1;
  for (int i = r - 1; i >= 0; --i) {
    out_strides[static_cast<std::size_t>(i)] = s;
    s *= out_shape[static_cast<std::size_t>(i)];
  }
  std::vector<std::int64_t> weight(static_cast<std::size_t>(r), 0);
  for (int i = 0; i < r; ++i) {
    weight[static_cast<std::size_t>(perm[i])] = out_strides[static_cast<std::size_t>(i)];
  }
  return weight;
}

}  // namespace

Tensor transpose(const Tensor& a, std::span<const int> perm) {
  int r = a.rank();
  require_numeric(static_cast<int>(perm.size()) == r, "transpose: bad permutation size");
  std::vector<bool> seen(static_cast<std::size_t>(r), false);
  for (int p : perm) {
    require_numeric(p >= 0 && p < r && !seen[static_cast<std::size_t>(p)],
                    "transpose: invalid permutation");
    seen[static_cast<std::size_t>(p)] = true;
  }
  std::vector<std::int64_t> out_shape(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) {
    out_shape[static_cast<std::size_t>(i)] = a.dim(perm[i]);
  }
  Tensor out = Tensor::zeros(out_shape);
  auto weights = transpose_weights(a.shape(), perm);
  const auto& av = a.data();
  auto& ov = out.data();
  for_each_broadcast(a.shape(), weights, [&](std::int64_t in_flat, std::int64_t out_flat) {
    ov[static_cast<std::size_t>(out_flat)] = av[static_cast<std::size_t>(in_flat)];
  });
  check_finite("transpose", out);

  if (wants_grad({&a})) {
    out.set_requires_grad(true);
    Tensor ac = a, oc = out;
    std::vector<int> perm_copy(perm.begin(), perm.end());
    active_tape()->record([ac, oc, perm_copy = std::move(perm_copy)]() mutable {
      auto weights2 = transpose_weights(ac.shape(), perm_copy);
      auto& ga = ac.grad();
      const auto& g = oc.grad();
      for_each_broadcast(ac.shape(), weights2,
                         [&](std::int64_t in_flat, std::int64_t out_flat) {
                           ga[static_cast<std::size_t>(in_flat)] +=
                               g[static_cast<std::size_t>(out_flat)];
                         });
    });
  }
  return out;
}

Tensor transpose(const Tensor& a) {
  int r = a.rank();
  require_numeric(r >= 2, "transpose: rank must be >= 2");
  std::vector<int> perm(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) perm[static_cast<std::size_t>(i)] = i;
  std::swap(perm[static_cast<std::size_t>(r - 2)], perm[static_cast<std::size_t>(r - 1)]);
  return transpose(a, perm);
}

Tensor sum(const Tensor& a) {
  double acc = 0.0;
  for (double v : a.data()) acc += v;
  Tensor out = Tensor::scalar(acc);
  check_finite("sum", out);
  if (wants_grad({&a})) {
    out.set_requires_grad(true);
    Tensor ac = a, oc = out;
    active_tape()->record([ac, oc]() mutable {
      double g = oc.grad()[0];
      auto& ga = ac.grad();
      for (double& v : ga) v += g;
    });
  }
  return out;
}

Tensor sum(const Tensor& a, int axis) {
  int r = a.rank();
  require_numeric(axis >= 0 && axis < r, "sum: axis out of range");
  std::vector<std::int64_t> out_shape;
  for (int i = 0; i < r; ++i) {
    if (i != axis) out_shape.push_back(a.dim(i));
  }
  std::int64_t outer = 1;
  for (int i = 0; i < axis; ++i) outer *= a.dim(i);
  std::int64_t l = a.dim(axis);
  std::int64_t inner = 1;
  for (int i = axis + 1; i < r; ++i) inner *= a.dim(i);

  Tensor out = Tensor::zeros(out_shape);
  const auto& av = a.data();
  auto& ov = out.data();
  for (std::int64_t o = 0; o < outer; ++o) {
    for (std::int64_t k = 0; k < l; ++k) {
      const double* src = av.data() + (o * l + k) * inner;
      double* dst = ov.data() + o * inner;
      for (std::int64_t i = 0; i < inner; ++i) dst[i] += src[i];
    }
  }
  check_finite("sum_axis", out);
  if (wants_grad({&a})) {
    out.set_requires_grad(true);
    Tensor ac = a, oc = out;
    active_tape()->record([ac, oc, outer, l, inner]() mutable {
      auto& ga = ac.grad();
      const auto& g = oc.grad();
      for (std::int64_t o = 0; o < outer; ++o) {
        for (std::int64_t k = 0; k < l; ++k) {
          double* dst = ga.data() + (o * l + k) * inner;
          const double* src = g.data() + o * inner;
          for (std::int64_t i = 0; i < inner; ++i) dst[i] += src[i];
        }
      }
    });
  }
  return out;
}

Tensor mean(const Tensor& a) {
  require_numeric(a.numel() > 0, "mean: empty tensor");
  return mul(sum(a), 1.0 / static_cast<double>(a.numel()));
}

Tensor reshape(const Tensor& a, std::vector<std::int64_t> new_shape) {
  std::int64_t n = 1;
  for (std::int64_t d : new_shape) n *= d;
  require_numeric(n == a.numel(), "reshape: element count mismatch");
  Tensor out = Tensor::from_data(std::move(new_shape), a.data());
  if (wants_grad({&a})) {
    out.set_requires_grad(true);
    Tensor ac = a, oc = out;
    active_tape()->record([ac, oc]() mutable {
      auto& ga = ac.grad();
      const auto& g = oc.grad();
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i];
    });
  }
  return out;
}

Tensor select_index(const Tensor& a, std::span<const std::int32_t> idx) {
  require_numeric(a.rank() == 2, "select_index: input must be rank 2");
  std::int64_t n = a.dim(0);
  std::int64_t c = a.dim(1);
  require_numeric(static_cast<std::int64_t>(idx.size()) == n,
                  "select_index: index count mismatch");
  Tensor out = Tensor::zeros({n});
  for (std::int64_t i = 0; i < n; ++i) {
    std::int32_t j = idx[static_cast<std::size_t>(i)];
    require_numeric(j >= 0 && j < c, "select_index: index out of range");
    out.data()[static_cast<std::size_t>(i)] =
        a.data()[static_cast<std::size_t>(i * c + j)];
  }
  check_finite("select_index", out);
  if (wants_grad({&a})) {
    out.set_requires_grad(true);
    Tensor ac = a, oc = out;
    std::vector<std::int32_t> idx_copy(idx.begin(), idx.end());
    active_tape()->record([ac, oc, idx_copy = std::move(idx_copy), c]() mutable {
      auto& ga = ac.grad();
      const auto& g = oc.grad();
      for (std::size_t i = 0; i < idx_copy.size(); ++i) {
        ga[i * static_cast<std::size_t>(c) + static_cast<std::size_t>(idx_copy[i])] += g[i];
      }
    });
  }
  return out;
}

Tensor gru_cell(const Tensor& x, const Tensor& h, const GruCellParams& p) {
  Tensor z = sigmoid(add(add(matmul(x, p.wz), matmul(h, p.uz)), p.bz));
  Tensor r = sigmoid(add(add(matmul(x, p.wr), matmul(h, p.ur)), p.br));
  Tensor n = tanh(add(add(matmul(x, p.wn), mul(r, matmul(h, p.un))), p.bn));
  // (1 - z) * n + z * h
  Tensor one_minus_z = add(neg(z), 1.0);
  return add(mul(one_minus_z, n), mul(z, h));
}

}  // namespace seqrec
