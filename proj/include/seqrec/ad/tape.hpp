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

#include <functional>
#include <string>
#include <vector>

#include "seqrec/ad/tensor.hpp"

namespace seqrec {

// Ordered record of primitive applications. Entries are appended in
// execution order (which is a topological order of the graph) and replayed
// in reverse by backward(). One backward pass consumes the tape.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  void record(std::function<void()> backward_fn) {
    entries_.push_back(std::move(backward_fn));
  }

  std::size_t size() const { return entries_.size(); }
  bool consumed() const { return consumed_; }

  // Seeds d(loss)/d(loss) = 1 and walks the record in reverse, accumulating
  // gradients into every tensor on a path from a requires_grad input.
  void backward(Tensor loss) {
    require_numeric(!consumed_, "tape already consumed by a previous backward pass");
    require_numeric(loss.numel() == 1, "backward requires a scalar loss");
    consumed_ = true;
    loss.grad()[0] += 1.0;
    for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) (*it)();
    entries_.clear();
  }

 private:
  std::vector<std::function<void()>> entries_;
  bool consumed_ = false;
};

namespace detail {
inline Tape*& active_tape_slot() {
  thread_local Tape* slot = nullptr;
  return slot;
}
}  // namespace detail

inline Tape* active_tape() { return detail::active_tape_slot(); }

// RAII guard making a tape the recording target for the current thread.
// Ops executed with no active tape run forward-only (inference).
class TapeScope {
 public:
  explicit TapeScope(Tape& tape) : prev_(detail::active_tape_slot()) {
    detail::active_tape_slot() = &tape;
  }
  ~TapeScope() { detail::active_tape_slot() = prev_; }
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape* prev_;
};

}  // namespace seqrec
