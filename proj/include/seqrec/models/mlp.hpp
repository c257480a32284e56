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

#ifndef SEQREC_MODELS_MLP_HPP_
#define SEQREC_MODELS_MLP_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "seqrec/models/ranker.hpp"
#include "seqrec/rng.hpp"

namespace seqrec {

struct MlpConfig {
  std::int64_t hidden_size = 256;
  int hidden_layers = 3;
};

// Feed-forward network on multi-hot prefixes: hidden_layers blocks of
// affine+relu, then an affine projection to |I| logits; cross-entropy on the
// next item.
class MlpModel : public Ranker {
 public:
  MlpModel(ItemIndexer indexer, std::int64_t max_seq_len, MlpConfig cfg, Rng& init_rng);

  std::string kind() const override { return "mlp"; }
  const ItemIndexer& indexer() const override { return indexer_; }
  std::int64_t max_seq_len() const override { return max_seq_len_; }
  std::vector<double> score_tokens(std::span<const std::int32_t> prefix) const override;
  std::vector<std::vector<double>> score_batch(
      const std::vector<std::vector<std::int32_t>>& prefixes) const override;

  Tensor forward_logits(const Tensor& x) const;  // [B, |I|] -> [B, |I|]
  Tensor loss_on_batch(const Tensor& x, std::span<const std::int32_t> target_cols) const;

  const MlpConfig& config() const { return cfg_; }
  std::vector<NamedTensor> named_parameters();
  std::vector<Tensor> parameters();

 private:
  ItemIndexer indexer_;
  std::int64_t max_seq_len_;
  MlpConfig cfg_;
  std::vector<Tensor> ws_;  // hidden_layers + 1 weight matrices
  std::vector<Tensor> bs_;
};

}  // namespace seqrec

#endif  // SEQREC_MODELS_MLP_HPP_
