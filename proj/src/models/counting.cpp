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

#include "seqrec/models/counting.hpp"

#include <algorithm>

#include "seqrec/common.hpp"

namespace seqrec {

PopModel::PopModel(ItemIndexer indexer, std::int64_t max_seq_len,
                   std::vector<double> scores)
    : indexer_(std::move(indexer)), max_seq_len_(max_seq_len), scores_(std::move(scores)) {
  require(static_cast<std::int32_t>(scores_.size()) == indexer_.n_items(),
          "pop: score size mismatch");
}

std::vector<double> PopModel::score_tokens(std::span<const std::int32_t> prefix) const {
  require_data(!prefix.empty(), "pop: empty prefix");
  return scores_;
}

std::vector<std::vector<double>> PopModel::score_session(
    std::span<const std::int32_t> tokens) const {
  require_data(tokens.size() >= 2, "score_session: need at least 2 tokens");
  return std::vector<std::vector<double>>(tokens.size() - 1, scores_);
}

MarkovModel::MarkovModel(ItemIndexer indexer, std::int64_t max_seq_len,
                         std::vector<double> score_table)
    : indexer_(std::move(indexer)),
      max_seq_len_(max_seq_len),
      score_table_(std::move(score_table)) {
  std::size_t expected = static_cast<std::size_t>(indexer_.n_items() + 1) *
                         static_cast<std::size_t>(indexer_.n_items());
  require(score_table_.size() == expected, "markov: score table size mismatch");
}

std::span<const double> MarkovModel::row(std::int32_t prev_token) const {
  std::size_t p = static_cast<std::size_t>(indexer_.n_items());
  return {score_table_.data() + static_cast<std::size_t>(prev_token) * p, p};
}

std::vector<double> MarkovModel::score_tokens(std::span<const std::int32_t> prefix) const {
  require_data(!prefix.empty(), "markov: empty prefix");
  std::int32_t prev = prefix.back();
  require_data(prev >= 1 && prev <= indexer_.n_items(), "markov: bad token in prefix");
  auto r = row(prev);
  return {r.begin(), r.end()};
}

std::vector<std::vector<double>> MarkovModel::score_session(
    std::span<const std::int32_t> tokens) const {
  require_data(tokens.size() >= 2, "score_session: need at least 2 tokens");
  std::vector<std::vector<double>> out;
  out.reserve(tokens.size() - 1);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    auto r = row(tokens[i]);
    out.emplace_back(r.begin(), r.end());
  }
  return out;
}

std::unique_ptr<PopModel> pop_fit(const std::vector<std::vector<std::int32_t>>& sessions,
                                  ItemIndexer indexer, std::int64_t max_seq_len) {
  require_data(!sessions.empty(), "pop_fit: empty training split");
  std::size_t p = static_cast<std::size_t>(indexer.n_items());
  std::vector<double> counts(p, 0.0);
  double total = 0.0;
  for (const auto& s : sessions) {
    for (std::int32_t t : s) {
      require_data(t >= 1 && static_cast<std::size_t>(t) <= p, "pop_fit: bad token");
      counts[static_cast<std::size_t>(t - 1)] += 1.0;
      total += 1.0;
    }
  }
  std::vector<double> scores(p, 0.0);
  if (total > 0) {
    for (std::size_t i = 0; i < p; ++i) scores[i] = counts[i] / total;
  }
  auto model = std::make_unique<PopModel>(std::move(indexer), max_seq_len, std::move(scores));
  model->set_counts(std::move(counts));
  return model;
}

std::unique_ptr<MarkovModel> markov_fit(
    const std::vector<std::vector<std::int32_t>>& sessions, ItemIndexer indexer,
    std::int64_t max_seq_len) {
  require_data(!sessions.empty(), "markov_fit: empty training split");
  std::size_t p = static_cast<std::size_t>(indexer.n_items());

  std::vector<double> pop_counts(p, 0.0);
  std::vector<double> pair_counts((p + 1) * (p + 1), 0.0);
  for (const auto& s : sessions) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      std::int32_t t = s[i];
      require_data(t >= 1 && static_cast<std::size_t>(t) <= p, "markov_fit: bad token");
      pop_counts[static_cast<std::size_t>(t - 1)] += 1.0;
      if (i + 1 < s.size()) {
        pair_counts[static_cast<std::size_t>(t) * (p + 1) +
                    static_cast<std::size_t>(s[i + 1])] += 1.0;
      }
    }
  }

  // Popularity fallback scores in [0, 1): counts / (max_count + 1).
  double max_count = 0.0;
  for (double c : pop_counts) max_count = std::max(max_count, c);
  std::vector<double> pop_norm(p, 0.0);
  for (std::size_t i = 0; i < p; ++i) pop_norm[i] = pop_counts[i] / (max_count + 1.0);

  std::vector<double> score_table((p + 1) * p, 0.0);
  std::vector<double> probs((p + 1) * (p + 1), 0.0);
  // Row 0: pure popularity (used for row lookups that hit tokens never seen
  // as a predecessor; also what PopModel would rank).
  std::copy(pop_norm.begin(), pop_norm.end(), score_table.begin());
  for (std::size_t prev = 1; prev <= p; ++prev) {
    double row_total = 0.0;
    for (std::size_t next = 1; next <= p; ++next) {
      row_total += pair_counts[prev * (p + 1) + next];
    }
    double* dst = score_table.data() + prev * p;
    if (row_total == 0.0) {
      std::copy(pop_norm.begin(), pop_norm.end(), dst);
      continue;
    }
    for (std::size_t next = 1; next <= p; ++next) {
      double c = pair_counts[prev * (p + 1) + next];
      if (c > 0.0) {
        double prob = c / row_total;
        probs[prev * (p + 1) + next] = prob;
        dst[next - 1] = 1.0 + prob;
      } else {
        dst[next - 1] = pop_norm[next - 1];
      }
    }
  }

  auto model = std::make_unique<MarkovModel>(std::move(indexer), max_seq_len,
                                             std::move(score_table));
  model->set_transition_probs(std::move(probs));
  return model;
}

}  // namespace seqrec
