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

#ifndef SEQREC_EVAL_EVALUATE_HPP_
#define SEQREC_EVAL_EVALUATE_HPP_

#include <cstdint>
#include <functional>
#include <json.hpp>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "seqrec/models/ranker.hpp"

namespace seqrec {

struct EvalConfig {
  std::vector<int> ks{1, 3};
  void validate() const;
};

struct EvalReport {
  std::int64_t events = 0;
  std::vector<int> ks;
  std::vector<double> recall;  // parallel to ks
  std::vector<double> ndcg;

  double recall_at(int k) const;
  double ndcg_at(int k) const;
  nlohmann::json to_json(const std::string& model_name) const;
};

// Next-item protocol: for every session and every position j in [2, l_s],
// score the prefix before j (truncated to the model's window) and record the
// rank of the item at j over the full vocabulary. Aggregation order is fixed,
// so reports are deterministic.
EvalReport evaluate(const Ranker& model,
                    const std::vector<std::vector<std::int32_t>>& sessions,
                    const EvalConfig& cfg = {});

// Same protocol driven by a bare scoring function (reference path for
// metric-oracle and model-equality checks). The scorer receives the
// already-truncated prefix.
using ScoreFn = std::function<std::vector<double>(std::span<const std::int32_t>)>;
EvalReport evaluate_with(const ScoreFn& scorer, std::int64_t max_seq_len,
                         const std::vector<std::vector<std::int32_t>>& sessions,
                         const EvalConfig& cfg = {});

// CSV leaderboard: header model,rec@1,ndcg@1,rec@3,ndcg@3,events; rows sorted
// by Recall@3 descending, ties by NDCG@3 descending then name ascending.
// All reports must share the same cutoffs and include k=1 and k=3.
std::string leaderboard_csv(std::vector<std::pair<std::string, EvalReport>> reports);

}  // namespace seqrec

#endif  // SEQREC_EVAL_EVALUATE_HPP_
