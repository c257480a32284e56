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
#include <memory>
#include <numeric>
#include <vector>

#include "seqrec/common.hpp"

namespace seqrec {

namespace detail {
struct TensorImpl {
  std::vector<std::int64_t> shape;
  std::vector<double> value;
  std::vector<double> grad;  // allocated lazily, same size as value
  bool requires_grad = false;
};
}  // namespace detail

// Dense row-major tensor of doubles with a shared value/grad buffer.
// Copies are shallow; ops produce fresh tensors and never mutate inputs.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::vector<std::int64_t> shape, bool requires_grad = false) {
    return full(std::move(shape), 0.0, requires_grad);
  }

  static Tensor full(std::vector<std::int64_t> shape, double v,
                     bool requires_grad = false) {
    auto impl = std::make_shared<detail::TensorImpl>();
    impl->shape = std::move(shape);
    impl->value.assign(count(impl->shape), v);
    impl->requires_grad = requires_grad;
    return Tensor(std::move(impl));
  }

  static Tensor from_data(std::vector<std::int64_t> shape, std::vector<double> data,
                          bool requires_grad = false) {
    require_numeric(count(shape) == static_cast<std::int64_t>(data.size()),
                    "tensor data size does not match shape");
    auto impl = std::make_shared<detail::TensorImpl>();
    impl->shape = std::move(shape);
    impl->value = std::move(data);
    impl->requires_grad = requires_grad;
    return Tensor(std::move(impl));
  }

  static Tensor scalar(double v, bool requires_grad = false) {
    return from_data({}, {v}, requires_grad);
  }

  bool defined() const { return impl_ != nullptr; }
  const std::vector<std::int64_t>& shape() const { return impl_->shape; }
  int rank() const { return static_cast<int>(impl_->shape.size()); }
  std::int64_t dim(int i) const { return impl_->shape[static_cast<std::size_t>(i)]; }
  std::int64_t numel() const { return static_cast<std::int64_t>(impl_->value.size()); }

  std::vector<double>& data() { return impl_->value; }
  const std::vector<double>& data() const { return impl_->value; }

  double item() const {
    require_numeric(numel() == 1, "item() requires a single-element tensor");
    return impl_->value[0];
  }

  bool requires_grad() const { return impl_->requires_grad; }
  void set_requires_grad(bool v) { impl_->requires_grad = v; }

  // Accumulation buffer; zero-initialized on first access.
  std::vector<double>& grad() {
    if (impl_->grad.size() != impl_->value.size()) {
      impl_->grad.assign(impl_->value.size(), 0.0);
    }
    return impl_->grad;
  }
  const std::vector<double>& grad() const {
    const_cast<Tensor*>(this)->grad();
    return impl_->grad;
  }
  void zero_grad() {
    if (!impl_->grad.empty()) impl_->grad.assign(impl_->value.size(), 0.0);
  }

  bool same_object(const Tensor& other) const { return impl_ == other.impl_; }
  detail::TensorImpl* impl() const { return impl_.get(); }
  std::shared_ptr<detail::TensorImpl> impl_ptr() const { return impl_; }

 private:
  explicit Tensor(std::shared_ptr<detail::TensorImpl> impl) : impl_(std::move(impl)) {}

  static std::int64_t count(const std::vector<std::int64_t>& shape) {
    std::int64_t n = 1;
    for (std::int64_t d : shape) {
      require_numeric(d >= 0, "negative tensor dimension");
      n *= d;
    }
    return n;
  }

  std::shared_ptr<detail::TensorImpl> impl_;
};

}  // namespace seqrec
