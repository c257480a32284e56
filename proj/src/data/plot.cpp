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

#include "seqrec/data/plot.hpp"

#include <algorithm>
#include <ostream>

#include "seqrec/common.hpp"

namespace seqrec {
namespace {

std::vector<std::int64_t> collect_events(const Dataset& d, PlotSeries series,
                                         std::int32_t item_id) {
  std::vector<std::int64_t> events;
  switch (series) {
    case PlotSeries::kItemPurchaseTime:
      for (const auto& m : d.matches) {
        for (const auto& s : m.sessions) {
          for (const auto& p : s.purchases) {
            if (p.item_id == item_id) events.push_back(p.t_s);
          }
        }
      }
      break;
    case PlotSeries::kMatchDuration:
      for (const auto& m : d.matches) events.push_back(m.duration_s);
      break;
    case PlotSeries::kSessionLength:
      for (const auto& m : d.matches) {
        for (const auto& s : m.sessions) {
          events.push_back(static_cast<std::int64_t>(s.purchases.size()));
        }
      }
      break;
  }
  return events;
}

}  // namespace

std::vector<PlotPoint> plot_data(const Dataset& d, PlotSeries series,
                                 std::int32_t item_id, std::int64_t bin_s,
                                 int window_bins) {
  require_data(bin_s > 0, "bin size must be > 0");
  require_data(window_bins >= 1 && window_bins % 2 == 1,
               "rolling window must be a positive odd bin count");

  auto events = collect_events(d, series, item_id);
  if (events.empty()) {
    if (series == PlotSeries::kItemPurchaseTime) {
      throw DataError("no purchase events for item_id " + std::to_string(item_id));
    }
    throw DataError("no events for requested series");
  }

  std::int64_t max_v = *std::max_element(events.begin(), events.end());
  std::size_t n_bins = static_cast<std::size_t>(max_v / bin_s) + 1;
  std::vector<double> hist(n_bins, 0.0);
  for (std::int64_t v : events) {
    hist[static_cast<std::size_t>(v / bin_s)] += 1.0;
  }
  double total = static_cast<double>(events.size());
  for (double& h : hist) h /= total;

  // The length distribution is reported raw; the time-based series get a
  // centered rolling mean whose window shrinks at the edges.
  if (series != PlotSeries::kSessionLength && window_bins > 1) {
    int half = window_bins / 2;
    std::vector<double> smooth(n_bins, 0.0);
    for (std::size_t i = 0; i < n_bins; ++i) {
      std::size_t lo = i >= static_cast<std::size_t>(half) ? i - half : 0;
      std::size_t hi = std::min(n_bins - 1, i + static_cast<std::size_t>(half));
      double acc = 0.0;
      for (std::size_t j = lo; j <= hi; ++j) acc += hist[j];
      smooth[i] = acc / static_cast<double>(hi - lo + 1);
    }
    hist = std::move(smooth);
  }

  std::vector<PlotPoint> points(n_bins);
  for (std::size_t i = 0; i < n_bins; ++i) {
    points[i].bin_start = static_cast<std::int64_t>(i) * bin_s;
    points[i].value = hist[i];
  }
  return points;
}

void write_plot_csv(std::ostream& out, std::span<const PlotPoint> points) {
  out << "bin_start_s,value\n";
  out.precision(17);
  for (const auto& p : points) out << p.bin_start << ',' << p.value << '\n';
}

}  // namespace seqrec
