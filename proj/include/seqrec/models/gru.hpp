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

#ifndef SEQREC_MODELS_GRU_HPP_
#define SEQREC_MODELS_GRU_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "seqrec/ad/ops.hpp"
#include "seqrec/models/ranker.hpp"
#include "seqrec/rng.hpp"

namespace seqrec {

struct GruConfig {
  std::int64_t emb_size = 64;
  std::int64_t cell_size = 128;
  int layers = 2;
  double dropout = 0.1;
};

// Stacked GRU over item embeddings. Left-padded positions leave the hidden
// state unchanged (h_t = m_t * cell(x_t, h_{t-1}) + (1 - m_t) * h_{t-1}), so
// padding never influences any state. The final top-layer state is projected
// to |I| logits; trained with cross-entropy on the next item.
class GruModel : public Ranker {
 public:
  GruModel(ItemIndexer indexer, std::int64_t max_seq_len, GruConfig cfg, Rng& init_rng);

  std::string kind() const override { return "gru"; }
  const ItemIndexer& indexer() const override { return indexer_; }
  std::int64_t max_seq_len() const override { return max_seq_len_; }
  std::vector<double> score_tokens(std::span<const std::int32_t> prefix) const override;
  std::vector<std::vector<double>> score_batch(
      const std::vector<std::vector<std::int32_t>>& prefixes) const override;
  std::vector<std::vector<double>> score_session(
      std::span<const std::int32_t> tokens) const override;

  // Batched session scoring: one recurrence pass over many sessions at once,
  // reading logits after every step. Exact whenever a session's prefixes fit
  // the window (length <= max_seq_len + 1); longer sessions fall back to
  // per-prefix scoring.
  std::vector<std::vector<std::vector<double>>> score_sessions_batch(
      const std::vector<std::vector<std::int32_t>>& sessions) const;

  // Top-layer state after the last position, [B, cell_size].
  Tensor forward_final_state(const TokenBatch& batch, bool train, Rng* rng) const;
  Tensor logits_from_state(const Tensor& h) const;  // [B, cell] -> [B, |I|]
  // Instance regime: one (prefix -> target) pair per batch row.
  Tensor loss_on_batch(const TokenBatch& batch, std::span<const std::int32_t> target_cols,
                       bool train, Rng* rng) const;
  // Session regime: whole sessions per row; cross-entropy at every position
  // whose successor is real. Same loss terms as the instance regime, grouped
  // by session (one forward pass instead of one per prefix).
  Tensor sequence_loss(const TokenBatch& sessions, bool train, Rng* rng) const;

  const GruConfig& config() const { return cfg_; }
  std::vector<NamedTensor> named_parameters();
  std::vector<Tensor> parameters();

 private:
  // Runs the stack; returns the top-layer state after every time step
  // (collect_all) or only the final one.
  std::vector<Tensor> run_stack(const TokenBatch& batch, bool train, Rng* rng,
                                bool collect_all) const;

  ItemIndexer indexer_;
  std::int64_t max_seq_len_;
  GruConfig cfg_;
  Tensor emb_;  // [|I|+1, emb_size], row 0 = padding
  std::vector<GruCellParams> cells_;
  Tensor out_w_;  // [cell_size, |I|]
  Tensor out_b_;  // [|I|]
};

}  // namespace seqrec

#endif  // SEQREC_MODELS_GRU_HPP_
