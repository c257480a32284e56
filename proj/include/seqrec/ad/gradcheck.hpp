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

#ifndef SEQREC_AD_GRADCHECK_HPP_
#define SEQREC_AD_GRADCHECK_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "seqrec/ad/tensor.hpp"

namespace seqrec {

struct GradCheckParam {
  std::string name;
  Tensor tensor;
};

struct GradCheckResult {
  double max_rel_err = 0.0;
  std::string worst_param;
  std::int64_t worst_index = -1;
  double analytic_at_worst = 0.0;
  double numeric_at_worst = 0.0;
};

// Compares reverse-mode gradients of a scalar-valued forward function against
// central finite differences. `forward` must rebuild the computation from the
// current parameter values on every call (it runs once under a recording tape
// for the analytic pass and 2N times without a tape for the numeric pass), and
// must be deterministic — disable dropout or drive it from a fixed-seed
// generator reconstructed inside `forward`.
//
// Relative error per element: |a - n| / max(1e-8, |a| + |n|).
GradCheckResult grad_check(const std::function<Tensor()>& forward,
                           std::vector<GradCheckParam> params, double epsilon = 1e-5);

}  // namespace seqrec

#endif  // SEQREC_AD_GRADCHECK_HPP_
