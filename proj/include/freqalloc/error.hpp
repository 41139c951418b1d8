// Copyright 2026 The freqalloc Authors
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

namespace freqalloc {

// Bad arguments or malformed inputs (dimensions, unknown names, missing data).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Text that could not be parsed (solution files, JSON documents).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A binary variable came back too far from {0, 1}.
class IntegralityError : public ParseError {
 public:
  using ParseError::ParseError;
};

// The external solver process failed without producing a solution.
class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An operation precondition on solution feasibility does not hold.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A threshold search bracket does not straddle the target yield.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace freqalloc
