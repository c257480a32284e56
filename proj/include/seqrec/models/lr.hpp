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

#ifndef SEQREC_MODELS_LR_HPP_
#define SEQREC_MODELS_LR_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "seqrec/models/ranker.hpp"
#include "seqrec/rng.hpp"

namespace seqrec {

// One-vs-rest logistic regression over multi-hot prefixes: one binary
// classifier per item, realized as a single |I| x |I| weight matrix plus bias.
// score(i) = sigmoid(w_i . v + b_i).
class LrModel : public Ranker {
 public:
  LrModel(ItemIndexer indexer, std::int64_t max_seq_len, Rng& init_rng);

  std::string kind() const override { return "lr"; }
  const ItemIndexer& indexer() const override { return indexer_; }
  std::int64_t max_seq_len() const override { return max_seq_len_; }
  std::vector<double> score_tokens(std::span<const std::int32_t> prefix) const override;
  std::vector<std::vector<double>> score_batch(
      const std::vector<std::vector<std::int32_t>>& prefixes) const override;

  // Logits for a batch of multi-hot rows [B, |I|] -> [B, |I|].
  Tensor forward_logits(const Tensor& x) const;
  // Per-class binary cross-entropy against one-hot targets, averaged over the
  // batch: mean_b [ sum_i softplus(z_bi) - z_b,target ].
  Tensor loss_on_batch(const Tensor& x, std::span<const std::int32_t> target_cols) const;

  std::vector<NamedTensor> named_parameters();
  std::vector<Tensor> parameters();

 private:
  ItemIndexer indexer_;
  std::int64_t max_seq_len_;
  Tensor w_;  // [|I|, |I|]
  Tensor b_;  // [|I|]
};

}  // namespace seqrec

#endif  // SEQREC_MODELS_LR_HPP_
