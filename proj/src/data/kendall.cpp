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

#include "seqrec/data/kendall.hpp"

#include <algorithm>
#include <unordered_map>

#include "seqrec/common.hpp"
#include "seqrec/data/preprocess.hpp"

namespace seqrec {

double kendall_tau(std::span<const std::int32_t> order_a,
                   std::span<const std::int32_t> order_b) {
  require_data(order_a.size() == order_b.size(),
               "kendall_tau: orderings differ in length");
  std::size_t n = order_a.size();
  require_data(n >= 2, "kendall_tau: need at least 2 elements");

  std::unordered_map<std::int32_t, std::size_t> pos_b;
  pos_b.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] = pos_b.emplace(order_b[i], i);
    require_data(inserted, "kendall_tau: duplicate id in ordering");
  }

  // Pair enumeration over positions in order_a; a pair is concordant when
  // order_b ranks it the same way.
  long long concordant = 0, discordant = 0;
  std::vector<std::size_t> b_of_a(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = pos_b.find(order_a[i]);
    require_data(it != pos_b.end(), "kendall_tau: orderings cover different ids");
    b_of_a[i] = it->second;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (b_of_a[i] < b_of_a[j]) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return static_cast<double>(concordant - discordant) / pairs;
}

namespace {

// Ids seen in `ref` ordered by descending count (counts taken from `freq`),
// ties broken by ascending id. Ids absent from `freq` count as 0.
std::vector<std::int32_t> freq_order(
    const std::map<std::int32_t, std::int64_t>& ref,
    const std::map<std::int32_t, std::int64_t>& freq) {
  std::vector<std::int32_t> ids;
  ids.reserve(ref.size());
  for (const auto& [id, count] : ref) ids.push_back(id);
  std::sort(ids.begin(), ids.end(), [&](std::int32_t a, std::int32_t b) {
    auto ita = freq.find(a);
    auto itb = freq.find(b);
    std::int64_t ca = ita == freq.end() ? 0 : ita->second;
    std::int64_t cb = itb == freq.end() ? 0 : itb->second;
    if (ca != cb) return ca > cb;
    return a < b;
  });
  return ids;
}

bool covers(const std::map<std::int32_t, std::int64_t>& whole,
            const std::map<std::int32_t, std::int64_t>& part) {
  for (const auto& [id, count] : whole) {
    if (part.find(id) == part.end()) return false;
  }
  return true;
}

}  // namespace

RepresentativenessReport validate_split_representativeness(const Dataset& whole,
                                                           const Dataset& part) {
  DatasetStats ws = compute_stats(whole);
  DatasetStats ps = compute_stats(part);

  RepresentativenessReport rep;
  rep.all_items_present = covers(ws.item_freq, ps.item_freq);
  rep.all_heroes_present = covers(ws.hero_freq, ps.hero_freq);

  auto whole_items = freq_order(ws.item_freq, ws.item_freq);
  auto part_items = freq_order(ws.item_freq, ps.item_freq);
  rep.tau_items = kendall_tau(whole_items, part_items);

  auto whole_heroes = freq_order(ws.hero_freq, ws.hero_freq);
  auto part_heroes = freq_order(ws.hero_freq, ps.hero_freq);
  rep.tau_heroes = kendall_tau(whole_heroes, part_heroes);
  return rep;
}

}  // namespace seqrec
