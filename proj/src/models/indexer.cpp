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

#include "seqrec/models/indexer.hpp"

#include <algorithm>
#include <numeric>

#include "seqrec/common.hpp"
#include "seqrec/models/ranker.hpp"

namespace seqrec {

namespace {

void build_index(std::vector<std::int32_t>& items,
                 std::unordered_map<std::int32_t, std::int32_t>& to_token) {
  std::sort(items.begin(), items.end());
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto [it, inserted] = to_token.emplace(items[i], static_cast<std::int32_t>(i + 1));
    require_data(inserted, "duplicate item id in indexer");
  }
}

}  // namespace

ItemIndexer::ItemIndexer(const ItemVocab& vocab) {
  for (const ItemInfo& info : vocab.entries()) {
    if (info.purchasable) items_.push_back(info.id);
  }
  require_data(!items_.empty(), "indexer: no purchasable items in vocabulary");
  build_index(items_, to_token_);
}

ItemIndexer::ItemIndexer(std::vector<std::int32_t> item_ids) : items_(std::move(item_ids)) {
  require_data(!items_.empty(), "indexer: empty item list");
  build_index(items_, to_token_);
}

std::int32_t ItemIndexer::token_of(std::int32_t item_id) const {
  auto it = to_token_.find(item_id);
  require_data(it != to_token_.end(), "indexer: unknown item id " + std::to_string(item_id));
  return it->second;
}

std::int32_t ItemIndexer::item_of(std::int32_t token) const {
  require_data(token >= 1 && token <= n_items(),
               "indexer: token out of item range: " + std::to_string(token));
  return items_[static_cast<std::size_t>(token - 1)];
}

bool ItemIndexer::has_item(std::int32_t item_id) const {
  return to_token_.find(item_id) != to_token_.end();
}

std::vector<std::vector<std::int32_t>> tokenize_sessions(
    const std::vector<MatchRecord>& matches, const ItemIndexer& indexer) {
  std::vector<std::vector<std::int32_t>> out;
  for (const MatchRecord& m : matches) {
    for (const Session& s : m.sessions) {
      std::vector<std::int32_t> tokens;
      tokens.reserve(s.purchases.size());
      for (const Purchase& p : s.purchases) tokens.push_back(indexer.token_of(p.item_id));
      out.push_back(std::move(tokens));
    }
  }
  return out;
}

std::vector<double> multi_hot(std::span<const std::int32_t> prefix, std::int32_t n_items) {
  require_data(!prefix.empty(), "multi_hot: empty prefix");
  std::vector<double> v(static_cast<std::size_t>(n_items), 0.0);
  for (std::int32_t t : prefix) {
    require_data(t >= 1 && t <= n_items, "multi_hot: token out of item range");
    v[static_cast<std::size_t>(t - 1)] = 1.0;
  }
  return v;
}

TokenBatch pack_left_padded(const std::vector<std::vector<std::int32_t>>& seqs,
                            std::int64_t l_max, bool fixed_width) {
  require(l_max > 0, "pack_left_padded: l_max must be positive");
  TokenBatch b;
  b.batch = static_cast<std::int64_t>(seqs.size());
  std::int64_t widest = 0;
  for (const auto& s : seqs) {
    widest = std::max(widest, std::min<std::int64_t>(
                                  static_cast<std::int64_t>(s.size()), l_max));
  }
  b.width = fixed_width ? l_max : widest;
  b.tokens.assign(static_cast<std::size_t>(b.batch * b.width), 0);
  b.mask.assign(static_cast<std::size_t>(b.batch * b.width), 0.0);
  for (std::int64_t r = 0; r < b.batch; ++r) {
    const auto& s = seqs[static_cast<std::size_t>(r)];
    std::int64_t keep = std::min<std::int64_t>(static_cast<std::int64_t>(s.size()), l_max);
    std::int64_t start = b.width - keep;  // left padding
    std::int64_t src0 = static_cast<std::int64_t>(s.size()) - keep;
    for (std::int64_t i = 0; i < keep; ++i) {
      b.tokens[static_cast<std::size_t>(r * b.width + start + i)] =
          s[static_cast<std::size_t>(src0 + i)];
      b.mask[static_cast<std::size_t>(r * b.width + start + i)] = 1.0;
    }
  }
  return b;
}

std::vector<std::vector<double>> Ranker::score_batch(
    const std::vector<std::vector<std::int32_t>>& prefixes) const {
  std::vector<std::vector<double>> out;
  out.reserve(prefixes.size());
  for (const auto& p : prefixes) out.push_back(score_tokens(p));
  return out;
}

std::vector<std::vector<double>> Ranker::score_session(
    std::span<const std::int32_t> tokens) const {
  require_data(tokens.size() >= 2, "score_session: need at least 2 tokens");
  std::int64_t n = static_cast<std::int64_t>(tokens.size());
  std::int64_t window = max_seq_len();
  std::vector<std::vector<std::int32_t>> prefixes;
  prefixes.reserve(static_cast<std::size_t>(n - 1));
  for (std::int64_t k = 1; k <= n - 1; ++k) {
    std::int64_t keep = std::min(k, window);
    prefixes.emplace_back(tokens.begin() + (k - keep), tokens.begin() + k);
  }
  return score_batch(prefixes);
}

std::vector<std::int32_t> Ranker::rank(std::span<const std::int32_t> prefix) const {
  require_data(!prefix.empty(), "rank: empty prefix");
  std::span<const std::int32_t> window = prefix;
  std::int64_t l = max_seq_len();
  if (static_cast<std::int64_t>(window.size()) > l) {
    window = window.subspan(window.size() - static_cast<std::size_t>(l));
  }
  std::vector<double> scores = score_tokens(window);
  std::vector<std::int32_t> tokens = ranked_tokens(scores);
  std::vector<std::int32_t> items;
  items.reserve(tokens.size());
  for (std::int32_t t : tokens) items.push_back(indexer().item_of(t));
  return items;
}

std::vector<std::int32_t> ranked_tokens(std::span<const double> scores) {
  std::vector<std::int32_t> tokens(scores.size());
  std::iota(tokens.begin(), tokens.end(), 1);
  std::stable_sort(tokens.begin(), tokens.end(), [&](std::int32_t a, std::int32_t b) {
    return scores[static_cast<std::size_t>(a - 1)] > scores[static_cast<std::size_t>(b - 1)];
  });
  return tokens;
}

}  // namespace seqrec
