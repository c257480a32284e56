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

#ifndef SEQREC_HPO_SEARCH_HPP_
#define SEQREC_HPO_SEARCH_HPP_

#include <cstdint>
#include <json.hpp>
#include <memory>
#include <string>
#include <vector>

#include "seqrec/eval/evaluate.hpp"
#include "seqrec/models/indexer.hpp"
#include "seqrec/rng.hpp"
#include "seqrec/train/trainer.hpp"

namespace seqrec {

// One named hyperparameter dimension; sampling draws uniformly from `values`.
struct GridDim {
  std::string name;
  std::vector<nlohmann::json> values;
};

using ParamSpace = std::vector<GridDim>;

// The search grid for a model kind. Counting baselines and the linear model
// have no tunable dimensions (empty space).
ParamSpace param_space(const std::string& kind);

// Independent uniform draw per dimension; every sample lies on the grid.
nlohmann::json sample_config(const ParamSpace& space, Rng& rng);

struct TrialOutcome {
  int trial_id = 0;  // 0-based
  std::uint64_t seed = 0;
  nlohmann::json config;
  RunManifest manifest;
  // Best-epoch validation Recall@3; meaningful only when the trial completed
  // at least one epoch.
  double val_recall3 = 0.0;
};

struct SearchOptions {
  int trials = 30;
  int jobs = 1;
  std::uint64_t master_seed = 1;
  TrainConfig base;  // per-trial seed is derived from master_seed
};

struct SearchResult {
  std::string kind;
  ParamSpace space;
  std::uint64_t master_seed = 0;
  std::vector<TrialOutcome> trials;
  int best_trial = -1;
  std::unique_ptr<Ranker> best_model;
  EvalReport test_report;  // best model only

  nlohmann::json summary_json() const;
};

// Random search: pre-samples `trials` configs from the master seed (so the
// draw is independent of `jobs`), trains each with its derived seed, selects
// the best validation Recall@3 (ties broken toward the earlier trial), and
// evaluates only that model on the test split. Every trial that completed no
// epoch is excluded from selection; if that excludes all of them the search
// fails with DivergenceError.
SearchResult run_search(const std::string& kind, const SearchOptions& opts,
                        const ItemIndexer& indexer,
                        const std::vector<std::vector<std::int32_t>>& train_sessions,
                        const std::vector<std::vector<std::int32_t>>& val_sessions,
                        const std::vector<std::vector<std::int32_t>>& test_sessions);

}  // namespace seqrec

#endif  // SEQREC_HPO_SEARCH_HPP_
