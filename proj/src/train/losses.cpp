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

#include "seqrec/train/losses.hpp"

#include "seqrec/ad/ops.hpp"
#include "seqrec/common.hpp"

namespace seqrec {

Tensor loss_cross_entropy(const Tensor& logits, std::span<const std::int32_t> target_cols) {
  require(logits.rank() == 2, "loss_cross_entropy: logits must be [N, C]");
  require(static_cast<std::int64_t>(target_cols.size()) == logits.dim(0),
          "loss_cross_entropy: target count mismatch");
  require(!target_cols.empty(), "loss_cross_entropy: empty batch");
  Tensor log_probs = log_softmax(logits);
  return neg(mean(select_index(log_probs, target_cols)));
}

Tensor loss_bpr(const Tensor& pos, const Tensor& neg_scores, const Tensor& valid_mask) {
  double n_valid = 0.0;
  for (double v : valid_mask.data()) n_valid += v;
  require(n_valid > 0.0, "loss_bpr: no valid positions");
  Tensor per_pos = logsigmoid(sub(pos, neg_scores));
  return mul(sum(mul(per_pos, valid_mask)), -1.0 / n_valid);
}

}  // namespace seqrec
