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

#include "seqrec/train/batching.hpp"

#include <algorithm>
#include <cmath>

#include "seqrec/common.hpp"

namespace seqrec {

std::vector<Instance> augment_subsequences(
    const std::vector<std::vector<std::int32_t>>& sessions) {
  std::vector<Instance> out;
  for (std::size_t s = 0; s < sessions.size(); ++s) {
    std::size_t l = sessions[s].size();
    require_data(l >= 2, "augment_subsequences: session shorter than 2");
    for (std::size_t j = 1; j < l; ++j) {
      out.push_back({static_cast<std::int32_t>(s), static_cast<std::int32_t>(j)});
    }
  }
  return out;
}

std::int64_t compute_l_max(const std::vector<std::vector<std::int32_t>>& sessions,
                           double coverage) {
  std::vector<std::int64_t> lengths;
  lengths.reserve(sessions.size());
  for (const auto& s : sessions) lengths.push_back(static_cast<std::int64_t>(s.size()));
  return compute_l_max_from_lengths(std::move(lengths), coverage);
}

std::int64_t compute_l_max_from_lengths(std::vector<std::int64_t> lengths,
                                        double coverage) {
  require_data(!lengths.empty(), "compute_l_max: no sessions");
  require(coverage > 0.0 && coverage <= 1.0, "compute_l_max: coverage must be in (0,1]");
  std::sort(lengths.begin(), lengths.end());
  double n = static_cast<double>(lengths.size());
  // Smallest index i with (i+1)/n >= coverage; the epsilon absorbs cases like
  // 0.995 * 200 evaluating to 198.999999...
  std::int64_t idx =
      static_cast<std::int64_t>(std::ceil(coverage * n - 1e-6)) - 1;
  idx = std::clamp<std::int64_t>(idx, 0, static_cast<std::int64_t>(lengths.size()) - 1);
  return lengths[static_cast<std::size_t>(idx)];
}

InstanceBatch materialize_batch(std::span<const Instance> chunk,
                                const std::vector<std::vector<std::int32_t>>& sessions,
                                std::int64_t l_max) {
  require(!chunk.empty(), "materialize_batch: empty chunk");
  std::vector<std::vector<std::int32_t>> prefixes;
  prefixes.reserve(chunk.size());
  InstanceBatch batch;
  batch.target_cols.reserve(chunk.size());
  for (const Instance& inst : chunk) {
    const auto& s = sessions[static_cast<std::size_t>(inst.session)];
    require(inst.prefix_len >= 1 &&
                static_cast<std::size_t>(inst.prefix_len) < s.size(),
            "materialize_batch: bad instance");
    prefixes.emplace_back(s.begin(), s.begin() + inst.prefix_len);
    batch.target_cols.push_back(s[static_cast<std::size_t>(inst.prefix_len)] - 1);
  }
  batch.tokens = pack_left_padded(prefixes, l_max, /*fixed_width=*/false);
  return batch;
}

ClozeResult cloze_mask(std::span<const std::int32_t> seq, double rho,
                       std::int32_t mask_token, Rng& rng) {
  require_data(!seq.empty(), "cloze_mask: empty sequence");
  require(rho > 0.0 && rho <= 1.0, "cloze_mask: rho must be in (0,1]");
  ClozeResult r;
  r.masked.assign(seq.begin(), seq.end());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (rng.next_double() < rho) {
      r.positions.push_back(static_cast<std::int32_t>(i));
      r.targets.push_back(seq[i]);
      r.masked[i] = mask_token;
    }
  }
  if (r.positions.empty()) {
    std::size_t i = static_cast<std::size_t>(
        rng.next_below(static_cast<std::uint64_t>(seq.size())));
    r.positions.push_back(static_cast<std::int32_t>(i));
    r.targets.push_back(seq[i]);
    r.masked[i] = mask_token;
  }
  return r;
}

}  // namespace seqrec
