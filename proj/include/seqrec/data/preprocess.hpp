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

#pragma once

#include <string>

#include "seqrec/data/dataset.hpp"

namespace seqrec {

struct PreprocessOptions {
  std::string mode_filter = "ranked_all_pick";  // empty = keep all modes
  double trim_quantile = 0.025;                 // in [0, 0.5)
};

// Filter pipeline, applied in order:
//   1. keep only matches whose game_mode equals mode_filter (if non-empty)
//   2. drop abandoned matches
//   3. drop matches flagged invalid by the parser or containing any
//      non-purchasable or unknown item purchase
//   4. drop matches containing any session with fewer than 2 purchases
//   5. sort by duration and remove floor(n * trim_quantile) matches from
//      each end (nearest-rank cut counts)
//   6. matches with fewer than 10 sessions are kept
// The result is re-sorted by start_time (stable).
Dataset preprocess(const Dataset& d, const PreprocessOptions& opts = {});

struct Splits {
  Dataset train;
  Dataset val;
  Dataset test;
  std::size_t boundary_train = 0;  // first index of val
  std::size_t boundary_val = 0;    // first index of test
};

// Splits at match granularity on the start_time order. Boundaries are
// floor(n * train_frac) and floor(n * (train_frac + val_frac)). Input must
// already be sorted by start_time; every part must be non-empty.
Splits split_chronological(const Dataset& d, const SplitSpec& spec);

DatasetStats compute_stats(const Dataset& d);

}  // namespace seqrec
