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

#include <map>
#include <string>

namespace qkdrate {

enum class RateUnit { per_raw_bit, per_distilled_bit, per_pulse };

inline const char* to_string(RateUnit u) {
  switch (u) {
    case RateUnit::per_raw_bit: return "bits/raw-bit";
    case RateUnit::per_distilled_bit: return "bits/distilled-bit";
    case RateUnit::per_pulse: return "bits/pulse";
  }
  return "?";
}

/// A lower bound on a secret-key rate together with the auxiliary parameters
/// (lambda11, q, mu, ...) at which it was attained.
struct RateBound {
  double value = 0.0;
  RateUnit unit = RateUnit::per_raw_bit;
  std::map<std::string, double> witness;

  bool positive() const { return value > 0.0; }
};

}  // namespace qkdrate
