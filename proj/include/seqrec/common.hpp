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

#include <stdexcept>
#include <string>

namespace seqrec {

inline constexpr const char* kVersion = "0.1.0";

// Base class for every error the library throws deliberately.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or semantically invalid input data (CLI exit code 2).
struct DataError : Error {
  using Error::Error;
};

// Shape mismatches, non-finite values, and other numeric-engine faults.
struct NumericError : Error {
  using Error::Error;
};

// Training produced a non-finite loss or gradient (CLI exit code 3).
struct DivergenceError : Error {
  using Error::Error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

inline void require_data(bool cond, const std::string& msg) {
  if (!cond) throw DataError(msg);
}

inline void require_numeric(bool cond, const std::string& msg) {
  if (!cond) throw NumericError(msg);
}

}  // namespace seqrec
