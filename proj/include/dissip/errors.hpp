// Copyright 2026 The dissip Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dissip {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes disagree (qubit counts, matrix dimensions).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters: odd k for a fermionic model, k out of range, and so on.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A configured size limit would be exceeded. `limit_name()` names the knob.
class CapacityError : public Error {
 public:
  CapacityError(const std::string& what, std::string limit_name, std::size_t limit)
      : Error(what + " (limit " + limit_name + " = " + std::to_string(limit) + ")"),
        limit_name_(std::move(limit_name)),
        limit_(limit) {}

  const std::string& limit_name() const noexcept { return limit_name_; }
  std::size_t limit() const noexcept { return limit_; }

 private:
  std::string limit_name_;
  std::size_t limit_;
};

/// The integrator step is too coarse, or positivity drifted past the abort level.
class RefinementError : public Error {
 public:
  RefinementError(const std::string& what, int suggested_steps)
      : Error(what + " (suggested steps: " + std::to_string(suggested_steps) + ")"),
        suggested_steps_(suggested_steps) {}

  int suggested_steps() const noexcept { return suggested_steps_; }

 private:
  int suggested_steps_;
};

/// A non-finite value showed up in an intermediate result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dissip
