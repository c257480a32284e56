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

#ifndef SEQREC_TRAIN_BATCHING_HPP_
#define SEQREC_TRAIN_BATCHING_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "seqrec/models/indexer.hpp"
#include "seqrec/rng.hpp"

namespace seqrec {

// One (prefix -> target) pair, stored as indices into the session list:
// prefix = sessions[session][0..prefix_len-1], target = sessions[session][prefix_len].
struct Instance {
  std::int32_t session = 0;
  std::int32_t prefix_len = 0;
};

// Every session of length l yields l-1 instances (prefix lengths 1..l-1).
std::vector<Instance> augment_subsequences(
    const std::vector<std::vector<std::int32_t>>& sessions);

// Smallest L so that at least `coverage` of sessions have length <= L.
std::int64_t compute_l_max(const std::vector<std::vector<std::int32_t>>& sessions,
                           double coverage = 0.995);
std::int64_t compute_l_max_from_lengths(std::vector<std::int64_t> lengths,
                                        double coverage = 0.995);

// A materialized batch: left-padded prefixes plus target column indices
// (token - 1, i.e. positions in an item-logit row).
struct InstanceBatch {
  TokenBatch tokens;
  std::vector<std::int32_t> target_cols;
};

InstanceBatch materialize_batch(std::span<const Instance> chunk,
                                const std::vector<std::vector<std::int32_t>>& sessions,
                                std::int64_t l_max);

// Cloze corruption of one sequence: each position is independently replaced
// by mask_token with probability rho; if no position was selected, one is
// forced at random. Targets keep the original tokens.
struct ClozeResult {
  std::vector<std::int32_t> masked;
  std::vector<std::int32_t> positions;  // indices into the sequence
  std::vector<std::int32_t> targets;
};
ClozeResult cloze_mask(std::span<const std::int32_t> seq, double rho,
                       std::int32_t mask_token, Rng& rng);

// Patience-based stopping on a maximized metric. observe() returns true when
// training should stop (no strict improvement for `patience` consecutive
// epochs). Epochs are 1-based.
class EarlyStopper {
 public:
  explicit EarlyStopper(int patience) : patience_(patience) {}

  bool observe(double value) {
    ++epoch_;
    if (epoch_ == 1 || value > best_value_) {
      best_value_ = value;
      best_epoch_ = epoch_;
      since_improvement_ = 0;
      return false;
    }
    ++since_improvement_;
    return since_improvement_ >= patience_;
  }

  int best_epoch() const { return best_epoch_; }
  double best_value() const { return best_value_; }
  int epochs_seen() const { return epoch_; }

 private:
  int patience_;
  int epoch_ = 0;
  int best_epoch_ = 0;
  int since_improvement_ = 0;
  double best_value_ = 0.0;
};

}  // namespace seqrec

#endif  // SEQREC_TRAIN_BATCHING_HPP_
