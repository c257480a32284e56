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

#ifndef SEQREC_MODELS_NARM_HPP_
#define SEQREC_MODELS_NARM_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "seqrec/ad/ops.hpp"
#include "seqrec/models/ranker.hpp"
#include "seqrec/rng.hpp"

namespace seqrec {

struct NarmConfig {
  std::int64_t emb_size = 32;
  std::int64_t enc_size = 80;
  int enc_layers = 1;
  double ctx_dropout = 0.2;
  double emb_dropout = 0.15;
};

// Attention-augmented GRU encoder. A single GRU stack encodes the prefix; its
// final state is the global context c_g, and an attention over all states
// (alpha_j = softmax_j of v . sigmoid(A1 h_T + A2 h_j), padding masked out)
// forms the local context c_l = sum_j alpha_j h_j. Scores are bilinear:
// logits = (dropout(concat(c_g, c_l)) B) E_items^T.
class NarmModel : public Ranker {
 public:
  NarmModel(ItemIndexer indexer, std::int64_t max_seq_len, NarmConfig cfg, Rng& init_rng);

  std::string kind() const override { return "narm"; }
  const ItemIndexer& indexer() const override { return indexer_; }
  std::int64_t max_seq_len() const override { return max_seq_len_; }
  std::vector<double> score_tokens(std::span<const std::int32_t> prefix) const override;
  std::vector<std::vector<double>> score_batch(
      const std::vector<std::vector<std::int32_t>>& prefixes) const override;

  Tensor forward_logits(const TokenBatch& batch, bool train, Rng* rng) const;
  Tensor loss_on_batch(const TokenBatch& batch, std::span<const std::int32_t> target_cols,
                       bool train, Rng* rng) const;

  // Intermediate values exposed for white-box checks (inference mode).
  struct DebugTrace {
    std::vector<std::vector<double>> hidden;  // per time step, [B * enc_size]
    std::vector<double> alpha;                // [B * width]
    std::vector<double> c_global;             // [B * enc_size]
    std::vector<double> c_local;              // [B * enc_size]
  };
  DebugTrace forward_debug(const TokenBatch& batch) const;

  const NarmConfig& config() const { return cfg_; }
  std::vector<NamedTensor> named_parameters();
  std::vector<Tensor> parameters();

 private:
  struct ForwardParts {
    Tensor logits;
    std::vector<Tensor> states;  // top-layer state per time step
    Tensor alpha;                // [B, width]
    Tensor c_global;
    Tensor c_local;
  };
  ForwardParts forward_parts(const TokenBatch& batch, bool train, Rng* rng) const;

  ItemIndexer indexer_;
  std::int64_t max_seq_len_;
  NarmConfig cfg_;
  Tensor emb_;  // [|I|+1, emb_size]
  std::vector<GruCellParams> cells_;
  Tensor a1_;  // [enc, enc]
  Tensor a2_;  // [enc, enc]
  Tensor v_;   // [enc, 1]
  Tensor b_map_;  // [2*enc, emb_size]
};

}  // namespace seqrec

#endif  // SEQREC_MODELS_NARM_HPP_
