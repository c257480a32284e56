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

#ifndef SEQREC_MODELS_INDEXER_HPP_
#define SEQREC_MODELS_INDEXER_HPP_

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "seqrec/data/dataset.hpp"
#include "seqrec/data/vocab.hpp"

namespace seqrec {

// Maps purchasable item ids to a dense token space:
//   token 0            = padding
//   tokens 1..n_items  = purchasable items in ascending item-id order
//   token n_items + 1  = mask (used only by the bidirectional model)
// Because tokens are assigned in ascending id order, breaking score ties by
// lower token equals breaking them by lower item id.
class ItemIndexer {
 public:
  ItemIndexer() = default;
  explicit ItemIndexer(const ItemVocab& vocab);          // keeps purchasable items
  explicit ItemIndexer(std::vector<std::int32_t> item_ids);  // must be unique

  std::int32_t n_items() const { return static_cast<std::int32_t>(items_.size()); }
  static constexpr std::int32_t pad_token() { return 0; }
  std::int32_t mask_token() const { return n_items() + 1; }

  std::int32_t token_of(std::int32_t item_id) const;  // DataError when absent
  std::int32_t item_of(std::int32_t token) const;     // token must be in 1..n_items
  bool has_item(std::int32_t item_id) const;
  const std::vector<std::int32_t>& items() const { return items_; }

 private:
  std::vector<std::int32_t> items_;  // ascending item ids
  std::unordered_map<std::int32_t, std::int32_t> to_token_;
};

// Flattens a corpus into per-session token sequences (match order, then
// player-slot order within a match). Throws DataError on items the indexer
// does not know.
std::vector<std::vector<std::int32_t>> tokenize_sessions(
    const std::vector<MatchRecord>& matches, const ItemIndexer& indexer);

// Binary presence vector over tokens 1..n_items (v[t-1] = 1 iff token t occurs
// in the prefix). Repeats collapse; order is discarded. Throws on an empty
// prefix or out-of-range tokens.
std::vector<double> multi_hot(std::span<const std::int32_t> prefix, std::int32_t n_items);

// A batch of left-padded token sequences in row-major [batch, width] layout.
// mask[i] is 1.0 at real positions, 0.0 at padding.
struct TokenBatch {
  std::int64_t batch = 0;
  std::int64_t width = 0;
  std::vector<std::int32_t> tokens;
  std::vector<double> mask;

  std::int32_t token_at(std::int64_t row, std::int64_t col) const {
    return tokens[static_cast<std::size_t>(row * width + col)];
  }
};

// Packs sequences into a TokenBatch, keeping the LAST l_max tokens of any
// longer sequence. Width is l_max when fixed_width (positional models), else
// the longest kept length.
TokenBatch pack_left_padded(const std::vector<std::vector<std::int32_t>>& seqs,
                            std::int64_t l_max, bool fixed_width);

}  // namespace seqrec

#endif  // SEQREC_MODELS_INDEXER_HPP_
