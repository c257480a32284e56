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

#include "seqrec/models/mlp.hpp"

#include "seqrec/ad/ops.hpp"
#include "seqrec/common.hpp"
#include "seqrec/models/init.hpp"
#include "seqrec/train/losses.hpp"

namespace seqrec {

MlpModel::MlpModel(ItemIndexer indexer, std::int64_t max_seq_len, MlpConfig cfg,
                   Rng& init_rng)
    : indexer_(std::move(indexer)), max_seq_len_(max_seq_len), cfg_(cfg) {
  require(cfg_.hidden_size > 0 && cfg_.hidden_layers >= 1, "mlp: bad config");
  std::int64_t p = indexer_.n_items();
  std::int64_t in = p;
  for (int l = 0; l < cfg_.hidden_layers; ++l) {
    ws_.push_back(init_dense(init_rng, in, cfg_.hidden_size));
    bs_.push_back(init_zeros({cfg_.hidden_size}));
    in = cfg_.hidden_size;
  }
  ws_.push_back(init_dense(init_rng, in, p));
  bs_.push_back(init_zeros({p}));
}

Tensor MlpModel::forward_logits(const Tensor& x) const {
  Tensor h = x;
  for (std::size_t l = 0; l + 1 < ws_.size(); ++l) {
    h = relu(add(matmul(h, ws_[l]), bs_[l]));
  }
  return add(matmul(h, ws_.back()), bs_.back());
}

Tensor MlpModel::loss_on_batch(const Tensor& x,
                               std::span<const std::int32_t> target_cols) const {
  return loss_cross_entropy(forward_logits(x), target_cols);
}

std::vector<double> MlpModel::score_tokens(std::span<const std::int32_t> prefix) const {
  return score_batch({{prefix.begin(), prefix.end()}})[0];
}

std::vector<std::vector<double>> MlpModel::score_batch(
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
  Tensor logits = forward_logits(x);
  std::vector<std::vector<double>> out(static_cast<std::size_t>(n));
  for (std::int64_t r = 0; r < n; ++r) {
    out[static_cast<std::size_t>(r)].assign(logits.data().begin() + r * p,
                                            logits.data().begin() + (r + 1) * p);
  }
  return out;
}

std::vector<NamedTensor> MlpModel::named_parameters() {
  std::vector<NamedTensor> out;
  for (std::size_t l = 0; l < ws_.size(); ++l) {
    out.push_back({"w" + std::to_string(l), ws_[l]});
    out.push_back({"b" + std::to_string(l), bs_[l]});
  }
  return out;
}

std::vector<Tensor> MlpModel::parameters() {
  std::vector<Tensor> out;
  for (std::size_t l = 0; l < ws_.size(); ++l) {
    out.push_back(ws_[l]);
    out.push_back(bs_[l]);
  }
  return out;
}

}  // namespace seqrec
