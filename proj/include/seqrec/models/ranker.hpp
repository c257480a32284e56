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

#ifndef SEQREC_MODELS_RANKER_HPP_
#define SEQREC_MODELS_RANKER_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "seqrec/ad/tensor.hpp"
#include "seqrec/models/indexer.hpp"

namespace seqrec {

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

// Common contract for all recommenders: given a session prefix (tokens,
// oldest first), produce one score per purchasable token. scores[i] is the
// score of token i+1. Scoring is deterministic (dropout off) and prefixes are
// truncated internally to the model's window (last max_seq_len tokens).
class Ranker {
 public:
  virtual ~Ranker() = default;

  virtual std::string kind() const = 0;
  virtual const ItemIndexer& indexer() const = 0;
  virtual std::int64_t max_seq_len() const = 0;

  virtual std::vector<double> score_tokens(std::span<const std::int32_t> prefix) const = 0;

  // Batched scoring; the default loops score_tokens. Models with an efficient
  // batched forward override this.
  virtual std::vector<std::vector<double>> score_batch(
      const std::vector<std::vector<std::int32_t>>& prefixes) const;

  // One score row per next-item event of a session: row i is conditioned on
  // tokens[0..i] (truncated to the window), for i in [0, n-2]. The default
  // materializes the n-1 prefixes and calls score_batch; recurrent models
  // override with a single forward pass where that is exact.
  virtual std::vector<std::vector<double>> score_session(
      std::span<const std::int32_t> tokens) const;

  // Full ranking for a prefix: item ids ordered by (score desc, id asc).
  std::vector<std::int32_t> rank(std::span<const std::int32_t> prefix) const;
};

// Orders tokens 1..scores.size() by (score descending, token ascending).
std::vector<std::int32_t> ranked_tokens(std::span<const double> scores);

}  // namespace seqrec

#endif  // SEQREC_MODELS_RANKER_HPP_
