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
#include <iosfwd>
#include <span>
#include <vector>

#include "seqrec/data/dataset.hpp"

namespace seqrec {

enum class PlotSeries {
  kItemPurchaseTime,  // purchase timestamps of one item (requires item_id)
  kMatchDuration,     // match durations
  kSessionLength,     // session lengths; raw histogram, no rolling average
};

struct PlotPoint {
  std::int64_t bin_start = 0;
  double value = 0.0;
};

// Bins the series' events by bin_s, normalizes each bin by the series' total
// event count, and (for the time-based series) applies a centered rolling
// mean of window_bins (odd) with shrinking windows at the edges.
std::vector<PlotPoint> plot_data(const Dataset& d, PlotSeries series,
                                 std::int32_t item_id, std::int64_t bin_s,
                                 int window_bins);

// Header: bin_start_s,value
void write_plot_csv(std::ostream& out, std::span<const PlotPoint> points);

}  // namespace seqrec
