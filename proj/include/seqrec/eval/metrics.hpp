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

#ifndef SEQREC_EVAL_METRICS_HPP_
#define SEQREC_EVAL_METRICS_HPP_

#include <cmath>
#include <cstdint>
#include <span>

namespace seqrec {

// 1-based rank of the target token under (score desc, token asc) ordering,
// computed by counting instead of sorting: one plus the number of strictly
// higher scores plus the number of equal scores at lower token ids.
inline int rank_of_token(std::span<const double> scores, std::int32_t target_token) {
  std::size_t t = static_cast<std::size_t>(target_token - 1);
  double s = scores[t];
  int rank = 1;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (scores[j] > s || (scores[j] == s && j < t)) ++rank;
  }
  return rank;
}

inline double recall_at_k(int rank, int k) { return rank <= k ? 1.0 : 0.0; }

// Single relevant item per event, so the ideal DCG is 1 and the metric is
// the discounted gain of the hit: 1/log2(rank+1) inside the cutoff.
inline double ndcg_at_k(int rank, int k) {
  if (rank > k) return 0.0;
  return 1.0 / std::log2(static_cast<double>(rank) + 1.0);
}

}  // namespace seqrec

#endif  // SEQREC_EVAL_METRICS_HPP_
