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

#ifndef SEQREC_SYNTH_GENERATE_HPP_
#define SEQREC_SYNTH_GENERATE_HPP_

#include <cstdint>
#include <json.hpp>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "seqrec/data/dataset.hpp"
#include "seqrec/eval/evaluate.hpp"

namespace seqrec {

// Parameters of a generated corpus. Sessions are random walks through a
// planted first-order transition matrix, so a first-order predictor has a
// known optimum on the output.
struct SynthSpec {
  std::int64_t n_matches = 1000;
  std::int32_t n_items = 50;
  std::int32_t n_heroes = 20;
  // Concentration of the transition rows: 0 = uniform rows, large values
  // approach deterministic successors.
  double transition_sharpness = 4.0;
  // Fraction of items marked consumable; consumables get elevated repeat
  // and early-purchase probability.
  double consumable_rate = 0.2;
  double mean_ls = 40.0;  // target session-length moments
  double std_ls = 10.0;
  double mean_duration_s = 2400.0;
  double std_duration_s = 600.0;
  std::uint64_t seed = 1;

  void validate() const;
};

// The generating chain: one row-major |I| x |I| matrix per hero (row = given
// previous item, column = next item; rows and columns ordered by ascending
// item id). Serves as the Bayes-optimal first-order ranker on its corpus.
struct TransitionOracle {
  std::vector<std::int32_t> items;  // ascending ids; index i <-> items[i]
  std::map<std::int32_t, std::vector<double>> matrices;  // hero_id -> P*P row-major
  std::string rng_algorithm;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  static TransitionOracle from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static TransitionOracle load(const std::string& path);

  // True next-item probabilities given the last item of the prefix, aligned
  // with `items` (index i scores items[i]).
  std::vector<double> scores_after(std::int32_t hero_id, std::int32_t last_item) const;

  // Item ids ranked best-first by the true transition row of the last prefix
  // item; ties broken by ascending id.
  std::vector<std::int32_t> rank(std::int32_t hero_id,
                                 std::span<const std::int32_t> prefix) const;
};

struct SynthResult {
  Dataset dataset;
  TransitionOracle oracle;
};

// Deterministic given spec.seed: same spec -> byte-identical corpus.
SynthResult generate(const SynthSpec& spec);

// Accuracy of the oracle ranker over every next-item event of the given
// matches, under the standard evaluation protocol (hero-aware).
EvalReport evaluate_oracle(const TransitionOracle& oracle,
                           const std::vector<MatchRecord>& matches,
                           const EvalConfig& cfg = {});

}  // namespace seqrec

#endif  // SEQREC_SYNTH_GENERATE_HPP_
