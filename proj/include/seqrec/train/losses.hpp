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

#ifndef SEQREC_TRAIN_LOSSES_HPP_
#define SEQREC_TRAIN_LOSSES_HPP_

#include <cstdint>
#include <span>

#include "seqrec/ad/tensor.hpp"

namespace seqrec {

// Mean over rows of -log softmax(logits)[target]. logits: [N, C];
// target_cols: N column indices. Callers whose column space includes
// non-predictable ids (padding / mask token) must exclude them beforehand
// with masked_fill to a large negative value.
Tensor loss_cross_entropy(const Tensor& logits, std::span<const std::int32_t> target_cols);

// Pairwise ranking loss -log sigmoid(pos - neg), averaged over positions with
// valid_mask == 1. pos, neg, valid_mask: same shape; valid_mask is a constant.
Tensor loss_bpr(const Tensor& pos, const Tensor& neg, const Tensor& valid_mask);

}  // namespace seqrec

#endif  // SEQREC_TRAIN_LOSSES_HPP_
