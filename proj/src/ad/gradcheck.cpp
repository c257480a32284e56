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

#include "seqrec/ad/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "seqrec/ad/tape.hpp"
#include "seqrec/common.hpp"

namespace seqrec {

GradCheckResult grad_check(const std::function<Tensor()>& forward,
                           std::vector<GradCheckParam> params, double epsilon) {
  // Analytic pass: one recorded forward + backward.
  for (auto& p : params) {
    p.tensor.set_requires_grad(true);
    p.tensor.zero_grad();
  }
  std::vector<std::vector<double>> analytic;
  {
    Tape tape;
    TapeScope scope(tape);
    Tensor loss = forward();
    require(loss.numel() == 1, "grad_check: forward must return a scalar");
    tape.backward(loss);
  }
  analytic.reserve(params.size());
  for (const auto& p : params) analytic.push_back(p.tensor.grad());

  // Numeric pass: central differences, no tape active.
  GradCheckResult result;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    auto& value = params[pi].tensor.data();
    for (std::size_t i = 0; i < value.size(); ++i) {
      double saved = value[i];
      value[i] = saved + epsilon;
      double f_plus = forward().item();
      value[i] = saved - epsilon;
      double f_minus = forward().item();
      value[i] = saved;

      double numeric = (f_plus - f_minus) / (2.0 * epsilon);
      double a = analytic[pi][i];
      double rel = std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
      if (rel > result.max_rel_err) {
        result.max_rel_err = rel;
        result.worst_param = params[pi].name;
        result.worst_index = static_cast<std::int64_t>(i);
        result.analytic_at_worst = a;
        result.numeric_at_worst = numeric;
      }
    }
  }
  return result;
}

}  // namespace seqrec
