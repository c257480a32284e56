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

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "seqrec/ad/tape.hpp"
#include "seqrec/ad/tensor.hpp"
#include "seqrec/rng.hpp"

namespace seqrec {

// Differentiable primitives. Each op computes its output eagerly, verifies
// that every produced value is finite, and — when a tape is active and any
// input requires a gradient — records a closure that accumulates input
// gradients from the output gradient. Inputs are never mutated.

// (m,k) x (k,n) -> (m,n); or batched (B,m,k) x (B,k,n) -> (B,m,n).
Tensor matmul(const Tensor& a, const Tensor& b);

// Elementwise; b broadcasts to a (dimensions aligned right, each b dim must
// equal the a dim or 1; b may have lower rank).
Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, double c);
Tensor mul(const Tensor& a, double c);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor neg(const Tensor& a);

Tensor concat(std::span<const Tensor> parts, int axis);
Tensor slice(const Tensor& a, int axis, std::int64_t start, std::int64_t len);

// table (V,d) gathered by row ids -> (ids.size(), d).
Tensor embedding_gather(const Tensor& table, std::span<const std::int32_t> ids);

Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor logsigmoid(const Tensor& a);

// Over the last axis.
Tensor softmax(const Tensor& a);
Tensor log_softmax(const Tensor& a);

// Inverted dropout; identity when train is false or p == 0.
Tensor dropout(const Tensor& a, double p, bool train, Rng& rng);

// Normalizes over the last axis, then applies the affine (gamma, beta),
// both of shape (last_dim). A constant vector normalizes to zeros.
Tensor layer_norm(const Tensor& a, const Tensor& gamma, const Tensor& beta,
                  double eps = 1e-5);

// mask has one byte per element of a; non-zero selects positions replaced by
// `fill` (gradient zero there). Use a large finite fill (e.g. -1e30) so the
// all-finite invariant holds.
Tensor masked_fill(const Tensor& a, std::span<const std::uint8_t> mask, double fill);

// General axis permutation; perm.size() == rank.
Tensor transpose(const Tensor& a, std::span<const int> perm);
// Swaps the last two axes.
Tensor transpose(const Tensor& a);

Tensor sum(const Tensor& a);            // all elements -> scalar
Tensor sum(const Tensor& a, int axis);  // reduces one axis
Tensor mean(const Tensor& a);           // all elements -> scalar

Tensor reshape(const Tensor& a, std::vector<std::int64_t> new_shape);

// a (n, c) indexed per row: out[i] = a[i, idx[i]].
Tensor select_index(const Tensor& a, std::span<const std::int32_t> idx);

// Gated recurrent unit cell:
//   z = sigmoid(x Wz + h Uz + bz)
//   r = sigmoid(x Wr + h Ur + br)
//   n = tanh(x Wn + r * (h Un) + bn)
//   h' = (1 - z) * n + z * h
struct GruCellParams {
  Tensor wz, uz, bz;
  Tensor wr, ur, br;
  Tensor wn, un, bn;
};
Tensor gru_cell(const Tensor& x, const Tensor& h, const GruCellParams& p);

}  // namespace seqrec
