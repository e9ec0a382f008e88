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

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <string>

#include "qkdrate/entropy.hpp"
#include "qkdrate/error.hpp"

namespace qkdrate {

/// Weights of a two-qubit state that is diagonal in the Bell basis
/// |Phi_ij> = (|0,i> + (-1)^j |1,1+i>) / sqrt(2). Stored in the order
/// 00, 01, 10, 11; the first index is the bit flip, the second the phase.
template <class Real>
class BasicBellDiagonal {
 public:
  using value_type = Real;

  BasicBellDiagonal() : lam_{Real(1), Real(0), Real(0), Real(0)} {}

  BasicBellDiagonal(Real l00, Real l01, Real l10, Real l11) : lam_{l00, l01, l10, l11} { validate(); }

  explicit BasicBellDiagonal(const std::array<Real, 4>& lam) : lam_(lam) { validate(); }

  // Skips validation; for maps whose output is normalized by construction.
  static BasicBellDiagonal unchecked(const std::array<Real, 4>& lam) {
    BasicBellDiagonal b;
    b.lam_ = lam;
    return b;
  }

  const Real& operator()(int bit, int phase) const { return lam_[2 * (bit & 1) + (phase & 1)]; }
  const Real& operator[](std::size_t k) const { return lam_[k]; }
  const std::array<Real, 4>& weights() const { return lam_; }

  const Real& l00() const { return lam_[0]; }
  const Real& l01() const { return lam_[1]; }
  const Real& l10() const { return lam_[2]; }
  const Real& l11() const { return lam_[3]; }

  /// QBER e_b = l10 + l11.
  Real qber() const { return lam_[2] + lam_[3]; }
  /// Phase error rate e_p = l01 + l11.
  Real phase_error() const { return lam_[1] + lam_[3]; }

  /// Shannon entropy of the four weights, i.e. S(sigma_AB).
  Real entropy() const { return shannon_entropy<Real>(std::span<const Real>(lam_.data(), 4)); }

  template <class Other>
  BasicBellDiagonal<Other> cast() const {
    return BasicBellDiagonal<Other>::unchecked(
        {Other(lam_[0]), Other(lam_[1]), Other(lam_[2]), Other(lam_[3])});
  }

  void validate() const {
    Real sum(0);
    for (const Real& l : lam_) {
      if (!(l >= Real(-kProbabilitySlack) && l <= Real(1 + kProbabilitySlack)))
        throw DomainError("BellDiagonal: weight outside [0,1]");
      sum += l;
    }
    using std::abs;
    if (!(abs(sum - Real(1)) <= Real(kProbabilitySlack)))
      throw DomainError("BellDiagonal: weights do not sum to 1");
  }

 private:
  std::array<Real, 4> lam_;
};

using BellDiagonal = BasicBellDiagonal<double>;

inline std::ostream& operator<<(std::ostream& os, const BellDiagonal& b) {
  return os << "(" << b[0] << ", " << b[1] << ", " << b[2] << ", " << b[3] << ")";
}

}  // namespace qkdrate
