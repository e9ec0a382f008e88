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

#include <cmath>
#include <initializer_list>
#include <span>
#include <string>
#include <type_traits>

#include "qkdrate/error.hpp"

namespace qkdrate {

/// Probabilities at or below this value are treated as exact zeros so that
/// 0 log 0 = 0 holds without producing NaNs.
inline constexpr double kZeroClamp = 1e-14;

/// Slack allowed when validating that a value lies in [0, 1].
inline constexpr double kProbabilitySlack = 1e-12;

namespace detail {

using std::log;

// Multiprecision scalars keep every strictly positive probability; the
// advantage-distillation threshold depends on eigenvalues near 1e-40.
template <class Real>
Real zero_clamp() {
  if constexpr (std::is_floating_point_v<Real>) {
    return Real(kZeroClamp);
  } else {
    return Real(0);
  }
}

template <class Real>
Real xlog2x(const Real& x) {
  if (!(x > zero_clamp<Real>())) return Real(0);
  // log2 is spelled through log so that multiprecision scalars work too.
  return x * log(x) / log(Real(2));
}

template <class Real>
void check_probability(const Real& x, const char* what) {
  if (!(x >= Real(-kProbabilitySlack) && x <= Real(1 + kProbabilitySlack))) {
    throw DomainError(std::string(what) + ": value outside [0,1]");
  }
}

}  // namespace detail

/// Binary entropy h(x) = -x log2 x - (1-x) log2 (1-x), with h(0) = h(1) = 0.
template <class Real = double>
Real binary_entropy(const Real& x) {
  detail::check_probability(x, "binary_entropy");
  return -detail::xlog2x(x) - detail::xlog2x(Real(1) - x);
}

/// Shannon entropy in bits of a (not necessarily normalized) list of
/// probabilities. Entries below kZeroClamp contribute nothing.
template <class Real = double>
Real shannon_entropy(std::span<const Real> probs) {
  Real s(0);
  for (const Real& p : probs) s -= detail::xlog2x(p);
  return s;
}

inline double shannon_entropy(std::initializer_list<double> probs) {
  return shannon_entropy<double>(std::span<const double>(probs.begin(), probs.size()));
}

}  // namespace qkdrate
