// Copyright 2026 The Liouville Authors
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

namespace liouville {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or invalid user input. `field` is a path such as
// "atoms[2].point[0]" or "line 4, column 7"; empty when not applicable.
class InputError : public Error {
 public:
  InputError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// A caller violated an operation's precondition (zero divisor, basis
// mismatch, certificate with c in H, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Numerical evaluation could not meet its contract (precision exhausted,
// unbounded integrand, tail bound above tolerance).
class NumericalError : public Error {
 public:
  using Error::Error;
};

// A bounded search hit its configured cap without finding a witness.
class CapReachedError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace liouville
