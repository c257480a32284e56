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

#include <cstdint>
#include <span>
#include <vector>

#include "seqrec/data/dataset.hpp"

namespace seqrec {

// Kendall rank correlation, tau-a: (concordant - discordant) / (n*(n-1)/2).
// Inputs are two orderings of the same id set (no ties by construction;
// callers pre-break ties by ascending id).
double kendall_tau(std::span<const std::int32_t> order_a,
                   std::span<const std::int32_t> order_b);

struct RepresentativenessReport {
  double tau_items = 0.0;
  double tau_heroes = 0.0;
  bool all_items_present = false;   // every item seen in `whole` is in `part`
  bool all_heroes_present = false;  // same for heroes
};

// Compares frequency-rank orderings (descending count, ties broken by
// ascending id) of items and heroes between a whole dataset and one part.
// Ids unseen in the part rank by count 0.
RepresentativenessReport validate_split_representativeness(
    const Dataset& whole, const Dataset& part);

}  // namespace seqrec
