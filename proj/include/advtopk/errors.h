// Copyright 2026 The advtopk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ADVTOPK_ERRORS_H_
#define ADVTOPK_ERRORS_H_

#include <stdexcept>
#include <string>

namespace advtopk {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument is outside its documented domain. The CLI maps this to exit
// code 1; every other Error maps to exit code 2.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// The input is structurally too small or empty (e.g. a graph without edges).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// The mixture carries no information (eta == 1/2, or both populations agree).
class DegenerateMixtureError : public Error {
 public:
  using Error::Error;
};

// A configured size cap or minimum sample count is violated.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// A numerical routine cannot proceed (whitening of a non-PSD matrix, ...).
class ConditioningError : public Error {
 public:
  using Error::Error;
};

// A bisection bracket does not straddle its target.
class BracketingError : public Error {
 public:
  using Error::Error;
};

}  // namespace advtopk

#endif  // ADVTOPK_ERRORS_H_
