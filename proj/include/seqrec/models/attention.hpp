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

#ifndef SEQREC_MODELS_ATTENTION_HPP_
#define SEQREC_MODELS_ATTENTION_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "seqrec/models/ranker.hpp"
#include "seqrec/rng.hpp"

namespace seqrec {

struct TransformerConfig {
  int heads = 2;
  int layers = 2;
  std::int64_t head_dim = 8;  // model width = heads * head_dim
  double dropout = 0.1;
  std::string nonlinearity = "relu";  // relu | tanh

  std::int64_t width() const { return static_cast<std::int64_t>(heads) * head_dim; }
};

namespace detail {

struct BlockParams {
  // Attention projections. The key projection carries no bias: softmax over
  // keys is invariant to a per-query constant shift, so a key bias would be
  // an inert parameter with an identically-zero gradient.
  Tensor wq, bq, wk, wv, bv, wo, bo;
  Tensor w1, b1, w2, b2;                      // feed-forward
  Tensor ln1_g, ln1_b, ln2_g, ln2_b;          // pre-norm scales/shifts
};

// Pre-norm self-attention stack over fixed-width, left-padded batches.
// Padding is excluded by key masking; causal stacks additionally mask future
// positions. Positions are a learned embedding indexed by absolute slot, so
// batches must always be packed to the same fixed width.
struct TransformerCore {
  TransformerCore() = default;
  TransformerCore(std::int64_t vocab_rows, TransformerConfig cfg, std::int64_t max_seq_len,
                  bool causal, bool scale_emb, Rng& init_rng);

  // batch.width must equal max_seq_len. Returns final states [B, S, width].
  Tensor forward_states(const TokenBatch& batch, bool train, Rng* rng) const;

  void collect_parameters(std::vector<NamedTensor>& out) const;

  TransformerConfig cfg;
  std::int64_t max_seq_len = 0;
  bool causal = false;
  bool scale_emb = false;
  Tensor emb;  // [vocab_rows, width]
  Tensor pos;  // [max_seq_len, width]
  std::vector<BlockParams> blocks;
  Tensor final_ln_g, final_ln_b;
};

}  // namespace detail

// Causal self-attention ranker: per-position next-item prediction, output
// scores tied to the input item embeddings, trained with the pairwise BPR
// loss on (observed, sampled-negative) pairs at every real position.
class SasrecModel : public Ranker {
 public:
  SasrecModel(ItemIndexer indexer, std::int64_t max_seq_len, TransformerConfig cfg,
              Rng& init_rng);

  std::string kind() const override { return "sasrec"; }
  const ItemIndexer& indexer() const override { return indexer_; }
  std::int64_t max_seq_len() const override { return core_.max_seq_len; }
  std::vector<double> score_tokens(std::span<const std::int32_t> prefix) const override;
  std::vector<std::vector<double>> score_batch(
      const std::vector<std::vector<std::int32_t>>& prefixes) const override;

  // Training step inputs: a fixed-width batch whose row r holds the session
  // minus its last token; pos_tokens/neg_tokens give, per position, the
  // observed successor and a sampled negative (0 where invalid).
  Tensor bpr_loss(const TokenBatch& batch, std::span<const std::int32_t> pos_tokens,
                  std::span<const std::int32_t> neg_tokens, bool train, Rng* rng) const;

  // Final states for a fixed-width batch, [B, S, width]; white-box tests use
  // this to check the causal contract.
  Tensor forward_states(const TokenBatch& batch) const {
    return core_.forward_states(batch, false, nullptr);
  }

  const TransformerConfig& config() const { return core_.cfg; }
  std::vector<NamedTensor> named_parameters();
  std::vector<Tensor> parameters();

 private:
  ItemIndexer indexer_;
  detail::TransformerCore core_;
};

// Bidirectional self-attention ranker trained on the Cloze objective: random
// positions are replaced by a dedicated mask token and reconstructed from
// both directions. Inference appends one mask token and reads its logits.
class BertModel : public Ranker {
 public:
  BertModel(ItemIndexer indexer, std::int64_t max_seq_len, TransformerConfig cfg,
            Rng& init_rng);

  std::string kind() const override { return "bert4rec"; }
  const ItemIndexer& indexer() const override { return indexer_; }
  std::int64_t max_seq_len() const override { return core_.max_seq_len; }
  std::vector<double> score_tokens(std::span<const std::int32_t> prefix) const override;
  std::vector<std::vector<double>> score_batch(
      const std::vector<std::vector<std::int32_t>>& prefixes) const override;

  // Cross-entropy at masked positions. flat_positions index into the
  // flattened [B * S] grid; target_tokens are the original ids there. The
  // padding and mask columns are excluded from the target space.
  Tensor cloze_loss(const TokenBatch& masked_batch,
                    std::span<const std::int32_t> flat_positions,
                    std::span<const std::int32_t> target_tokens, bool train,
                    Rng* rng) const;

  // Logits over the full token space [B*S, |I|+2] (white-box tests).
  Tensor forward_token_logits(const TokenBatch& batch) const;

  const TransformerConfig& config() const { return core_.cfg; }
  std::vector<NamedTensor> named_parameters();
  std::vector<Tensor> parameters();

 private:
  Tensor logits_from_states(const Tensor& states_2d) const;  // [N,d] -> [N, |I|+2]

  ItemIndexer indexer_;
  detail::TransformerCore core_;
  Tensor out_bias_;  // [|I| + 2]
};

}  // namespace seqrec

#endif  // SEQREC_MODELS_ATTENTION_HPP_
