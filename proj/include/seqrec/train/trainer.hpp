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

#ifndef SEQREC_TRAIN_TRAINER_HPP_
#define SEQREC_TRAIN_TRAINER_HPP_

#include <cstdint>
#include <json.hpp>
#include <memory>
#include <string>
#include <vector>

#include "seqrec/models/ranker.hpp"

namespace seqrec {

struct TrainConfig {
  double lr = 1e-3;
  int max_epochs = 25;
  int patience = 3;
  std::int64_t batch_size = 128;
  std::int64_t warmup_steps = 10000;  // linear warmup, bidirectional model only
  double mask_prob = 0.2;             // Cloze probability, bidirectional model only
  std::int64_t max_seq_len = 0;       // required
  std::uint64_t seed = 1;
  // When set, the recurrent model trains on whole sessions with a loss term
  // per position (the same cross-entropy terms as prefix-instance training,
  // grouped by session) instead of one term per materialized prefix. Much
  // faster on long sessions; recorded in the manifest.
  bool gru_sequence_mode = false;

  void validate() const;
};

struct RunManifest {
  std::string kind;
  nlohmann::json hyper;
  TrainConfig config;
  std::string rng_algorithm;
  std::vector<double> val_recall3;  // one entry per epoch actually run
  std::vector<double> train_loss;
  int best_epoch = 0;  // 1-based; 0 if no epoch completed
  int epochs_run = 0;
  bool diverged = false;
  int diverged_epoch = 0;

  nlohmann::json to_json() const;
};

struct TrainResult {
  std::unique_ptr<Ranker> model;  // best-epoch parameters; null if nothing completed
  RunManifest manifest;
};

// Trains (or fits, for the counting baselines) a model of the given kind.
// Deterministic given cfg.seed. On divergence (non-finite loss) training
// aborts: the manifest records the failure epoch and the best model so far
// (if any) is returned.
TrainResult train_model(const std::string& kind, const nlohmann::json& hyper,
                        const TrainConfig& cfg, ItemIndexer indexer,
                        const std::vector<std::vector<std::int32_t>>& train_sessions,
                        const std::vector<std::vector<std::int32_t>>& val_sessions);

}  // namespace seqrec

#endif  // SEQREC_TRAIN_TRAINER_HPP_
