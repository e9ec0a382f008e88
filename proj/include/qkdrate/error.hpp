// Copyright 2026 The qkdrate Authors
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

namespace qkdrate {

// Input outside the mathematical domain of an operation (probability > 1,
// negative eigenvalue, unnormalized weights, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A filtered or sifted branch with zero probability. Callers usually treat
// this as "the branch is always discarded".
class ZeroWeightError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative routine did not meet its tolerance within the iteration budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A bracket handed to a root finder does not contain a sign change.
class NoSignChangeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Problem size exceeds what an exhaustive enumeration routine supports.
class SizeLimitError : public std::length_error {
 public:
  using std::length_error::length_error;
};

namespace detail {

[[noreturn]] inline void domain_fail(const std::string& what) { throw DomainError(what); }

}  // namespace detail

}  // namespace qkdrate
