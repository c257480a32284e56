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

#ifndef SEQREC_MODELS_COUNTING_HPP_
#define SEQREC_MODELS_COUNTING_HPP_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "seqrec/models/ranker.hpp"

namespace seqrec {

// Popularity baseline: score(token) = purchase count over every position of
// every training session, normalized to frequencies. The query is ignored.
class PopModel : public Ranker {
 public:
  PopModel(ItemIndexer indexer, std::int64_t max_seq_len, std::vector<double> scores);

  std::string kind() const override { return "pop"; }
  const ItemIndexer& indexer() const override { return indexer_; }
  std::int64_t max_seq_len() const override { return max_seq_len_; }
  std::vector<double> score_tokens(std::span<const std::int32_t> prefix) const override;
  std::vector<std::vector<double>> score_session(
      std::span<const std::int32_t> tokens) const override;

  const std::vector<double>& scores() const { return scores_; }
  const std::vector<double>& counts() const { return counts_; }
  void set_counts(std::vector<double> counts) { counts_ = std::move(counts); }

 private:
  ItemIndexer indexer_;
  std::int64_t max_seq_len_;
  std::vector<double> scores_;  // size n_items, scores_[t-1]
  std::vector<double> counts_;  // raw counts (empty when loaded from checkpoint)
};

// First-order transition baseline. Scoring uses a precomputed score table of
// (n_items + 1) rows by n_items columns; row r scores a prefix ending in
// token r, row 0 is the popularity fallback (also used for rows never seen as
// a predecessor). Score encoding within a row:
//   - token with transition probability p > 0:  1 + p
//   - token with zero probability:              count(token) / (max_count + 1)
// The second form lies in [0, 1), so every positive-probability token ranks
// ahead of every zero-probability token, zero-probability tokens rank by
// popularity, and remaining ties fall back to ascending token id.
class MarkovModel : public Ranker {
 public:
  MarkovModel(ItemIndexer indexer, std::int64_t max_seq_len,
              std::vector<double> score_table);

  std::string kind() const override { return "markov"; }
  const ItemIndexer& indexer() const override { return indexer_; }
  std::int64_t max_seq_len() const override { return max_seq_len_; }
  std::vector<double> score_tokens(std::span<const std::int32_t> prefix) const override;
  std::vector<std::vector<double>> score_session(
      std::span<const std::int32_t> tokens) const override;

  const std::vector<double>& score_table() const { return score_table_; }

  // Row-normalized transition probabilities, (n_items+1) x (n_items+1),
  // row/col indexed by token. Empty rows stay all-zero. Populated by
  // markov_fit; empty when the model was loaded from a checkpoint.
  const std::vector<double>& transition_probs() const { return transition_probs_; }
  void set_transition_probs(std::vector<double> p) { transition_probs_ = std::move(p); }

 private:
  std::span<const double> row(std::int32_t prev_token) const;

  ItemIndexer indexer_;
  std::int64_t max_seq_len_;
  std::vector<double> score_table_;  // (n_items+1) * n_items
  std::vector<double> transition_probs_;
};

std::unique_ptr<PopModel> pop_fit(const std::vector<std::vector<std::int32_t>>& sessions,
                                  ItemIndexer indexer, std::int64_t max_seq_len);

std::unique_ptr<MarkovModel> markov_fit(
    const std::vector<std::vector<std::int32_t>>& sessions, ItemIndexer indexer,
    std::int64_t max_seq_len);

}  // namespace seqrec

#endif  // SEQREC_MODELS_COUNTING_HPP_
