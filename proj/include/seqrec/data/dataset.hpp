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
#include <map>
#include <string>
#include <vector>

#include "seqrec/data/vocab.hpp"

namespace seqrec {

struct Purchase {
  std::int32_t item_id = 0;
  std::int32_t t_s = 0;  // seconds since match start, <= match duration
};

enum class Team { kRadiant, kDire };

// One player's purchase sequence within a match.
struct Session {
  std::int32_t player_slot = 0;  // 0..9
  std::int32_t hero_id = 0;
  Team team = Team::kRadiant;
  std::vector<Purchase> purchases;  // ordered by t_s, non-decreasing

  std::size_t length() const { return purchases.size(); }
};

struct MatchRecord {
  std::int64_t match_id = 0;
  std::int64_t start_time = 0;  // epoch seconds
  std::int32_t duration_s = 0;
  std::string game_mode;
  bool abandoned = false;
  std::vector<Session> sessions;  // at most 10

  // Set by the parser when the match references unknown ids or violates
  // relational constraints; such matches are dropped during preprocessing.
  std::string invalid_reason;

  bool valid() const { return invalid_reason.empty(); }
};

struct Dataset {
  ItemVocab items;
  HeroVocab heroes;
  std::vector<MatchRecord> matches;

  std::size_t n_sessions() const {
    std::size_t n = 0;
    for (const auto& m : matches) n += m.sessions.size();
    return n;
  }
};

// Chronological split fractions; must sum to 1 and each part must be > 0.
struct SplitSpec {
  double train_frac = 0.0;
  double val_frac = 0.0;
  double test_frac = 0.0;

  void validate() const;
};

struct DatasetStats {
  std::size_t n_matches = 0;
  std::size_t n_sessions = 0;
  std::size_t n_items_observed = 0;
  std::size_t n_heroes_observed = 0;
  double mean_session_length = 0.0;
  double std_session_length = 0.0;  // population standard deviation
  std::map<std::int32_t, std::int64_t> item_freq;
  std::map<std::int32_t, std::int64_t> hero_freq;
};

}  // namespace seqrec
