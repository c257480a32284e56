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

#include "seqrec/models/lr.hpp"

#include "seqrec/ad/ops.hpp"
#include "seqrec/common.hpp"
#include "seqrec/models/init.hpp"

namespace seqrec {

LrModel::LrModel(ItemIndexer indexer, std::int64_t max_seq_len, Rng& init_rng)
    : indexer_(std::move(indexer)), max_seq_len_(max_seq_len) {
  std::int64_t p = indexer_.n_items();
  w_ = init_dense(init_rng, p, p);
  b_ = init_zeros({p});
}

Tensor LrModel::forward_logits(const Tensor& x) const {
  return add(matmul(x, w_), b_);
}

Tensor LrModel::loss_on_batch(const Tensor& x,
                              std::span<const std::int32_t> target_cols) const {
  Tensor z = forward_logits(x);
  // softplus(z) = -logsigmoid(-z)
  Tensor softplus_all = sum(neg(logsigmoid(neg(z))), 1);        // [B]
  Tensor z_target = select_index(z, target_cols);               // [B]
  return mean(sub(softplus_all, z_target));
}

std::vector<double> LrModel::score_tokens(std::span<const std::int32_t> prefix) const {
  return score_batch({{prefix.begin(), prefix.end()}})[0];
}

std::vector<std::vector<double>> LrModel::score_batch(
    const std::vector<std::vector<std::int32_t>>& prefixes) const {
  std::int64_t p = indexer_.n_items();
  std::int64_t n = static_cast<std::int64_t>(prefixes.size());
  Tensor x = Tensor::zeros({n, p});
  for (std::int64_t r = 0; r < n; ++r) {
    const auto& pref = prefixes[static_cast<std::size_t>(r)];
    std::size_t start = pref.size() > static_cast<std::size_t>(max_seq_len_)
                            ? pref.size() - static_cast<std::size_t>(max_seq_len_)
                            : 0;
    std::vector<double> v = multi_hot(
        std::span<const std::int32_t>(pref.data() + start, pref.size() - start),
        static_cast<std::int32_t>(p));
    std::copy(v.begin(), v.end(), x.data().begin() + r * p);
  }
  Tensor scores = sigmoid(forward_logits(x));
  std::vector<std::vector<double>> out(static_cast<std::size_t>(n));
  for (std::int64_t r = 0; r < n; ++r) {
    out[static_cast<std::size_t>(r)].assign(scores.data().begin() + r * p,
                                            scores.data().begin() + (r + 1) * p);
  }
  return out;
}

std::vector<NamedTensor> LrModel::named_parameters() {
  return {{"w", w_}, {"b", b_}};
}

std::vector<Tensor> LrModel::parameters() { return {w_, b_}; }

}  // namespace seqrec
