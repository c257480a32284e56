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

#ifndef SEQREC_AD_ADAM_HPP_
#define SEQREC_AD_ADAM_HPP_

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "seqrec/ad/tensor.hpp"
#include "seqrec/common.hpp"

namespace seqrec {

// Adam optimizer with bias correction. Parameters are shared tensor handles;
// step() reads each parameter's accumulated gradient and updates its value
// in place. Gradients are not cleared by step(); call zero_grad() between
// iterations.
class Adam {
 public:
  struct Options {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
  };

  explicit Adam(std::vector<Tensor> params) : Adam(std::move(params), Options()) {}

  Adam(std::vector<Tensor> params, Options opts)
      : params_(std::move(params)), opts_(opts) {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (const Tensor& p : params_) {
      m_.emplace_back(p.data().size(), 0.0);
      v_.emplace_back(p.data().size(), 0.0);
    }
  }

  // One update with the configured base learning rate.
  void step() { step(opts_.lr); }

  // One update with an explicit learning rate (warmup / decay schedules
  // scale the base rate per step and pass the result here).
  void step(double lr_now) {
    ++t_;
    double bc1 = 1.0 - std::pow(opts_.beta1, static_cast<double>(t_));
    double bc2 = 1.0 - std::pow(opts_.beta2, static_cast<double>(t_));
    for (std::size_t pi = 0; pi < params_.size(); ++pi) {
      auto& value = params_[pi].data();
      const auto& grad = params_[pi].grad();
      auto& m = m_[pi];
      auto& v = v_[pi];
      for (std::size_t i = 0; i < value.size(); ++i) {
        double g = grad[i];
        m[i] = opts_.beta1 * m[i] + (1.0 - opts_.beta1) * g;
        v[i] = opts_.beta2 * v[i] + (1.0 - opts_.beta2) * g * g;
        double m_hat = m[i] / bc1;
        double v_hat = v[i] / bc2;
        value[i] -= lr_now * m_hat / (std::sqrt(v_hat) + opts_.eps);
        require_numeric(std::isfinite(value[i]), "adam: parameter became non-finite");
      }
    }
  }

  void zero_grad() {
    for (Tensor& p : params_) p.zero_grad();
  }

  std::int64_t steps_taken() const { return t_; }
  const Options& options() const { return opts_; }

 private:
  std::vector<Tensor> params_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  Options opts_;
  std::int64_t t_ = 0;
};

}  // namespace seqrec

#endif  // SEQREC_AD_ADAM_HPP_
