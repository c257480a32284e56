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

#ifndef SEQREC_MODELS_INIT_HPP_
#define SEQREC_MODELS_INIT_HPP_

#include <cmath>
#include <utility>
#include <vector>

#include "seqrec/ad/tensor.hpp"
#include "seqrec/rng.hpp"

namespace seqrec {

// Embedding tables: uniform(-0.05, 0.05).
inline Tensor init_embedding(Rng& rng, std::vector<std::int64_t> shape) {
  Tensor t = Tensor::zeros(std::move(shape));
  for (double& v : t.data()) v = rng.next_uniform(-0.05, 0.05);
  t.set_requires_grad(true);
  return t;
}

// Dense maps: Glorot-style uniform(-L, L), L = sqrt(6 / (fan_in + fan_out)).
inline Tensor init_dense(Rng& rng, std::int64_t fan_in, std::int64_t fan_out) {
  double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor t = Tensor::zeros({fan_in, fan_out});
  for (double& v : t.data()) v = rng.next_uniform(-limit, limit);
  t.set_requires_grad(true);
  return t;
}

inline Tensor init_zeros(std::vector<std::int64_t> shape) {
  Tensor t = Tensor::zeros(std::move(shape));
  t.set_requires_grad(true);
  return t;
}

inline Tensor init_ones(std::vector<std::int64_t> shape) {
  Tensor t = Tensor::full(std::move(shape), 1.0);
  t.set_requires_grad(true);
  return t;
}

}  // namespace seqrec

#endif  // SEQREC_MODELS_INIT_HPP_
