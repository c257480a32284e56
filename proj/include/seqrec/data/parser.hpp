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

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "seqrec/data/dataset.hpp"

namespace seqrec {

struct ParseOptions {
  // Strict mode aborts on the first malformed line; otherwise malformed
  // lines are skipped and reported.
  bool strict = false;
};

struct LineIssue {
  std::size_t line = 0;  // 1-based line number in the input
  std::string message;
};

struct MatchFlag {
  std::int64_t match_id = 0;
  std::string reason;
};

struct ParseReport {
  std::size_t lines_total = 0;
  std::size_t matches_parsed = 0;
  std::vector<LineIssue> skipped_lines;
  std::vector<MatchFlag> invalid_matches;
};

// Reads one JSON match record per line. Returns all parseable matches in
// input order with no filtering; matches referencing unknown items/heroes or
// violating relational constraints (unsorted purchases, t_s > duration) are
// kept but flagged via MatchRecord::invalid_reason and listed in the report.
Dataset parse_matches(std::istream& in, const ItemVocab& items,
                      const HeroVocab& heroes, const ParseOptions& opts = {},
                      ParseReport* report = nullptr);

void write_matches(std::ostream& out, const Dataset& d);

// Directory convention: matches.jsonl + items.csv + heroes.csv.
Dataset load_dataset_dir(const std::string& dir, const ParseOptions& opts = {},
                         ParseReport* report = nullptr);
void save_dataset_dir(const std::string& dir, const Dataset& d);

}  // namespace seqrec
