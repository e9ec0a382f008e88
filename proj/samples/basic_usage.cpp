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

// Evaluates a few bounds through the library interface.

#include <cstdio>

#include "qkdrate/qkdrate.hpp"

int main() {
  using namespace qkdrate;

  // One-way bound on a Bell-diagonal state, with and without randomization.
  const BellDiagonal lam(0.85, 0.05, 0.05, 0.05);
  std::printf("rate(q=0)    = %.6f\n", bell_keyrate(lam, 0.0));
  std::printf("rate(q=0.1)  = %.6f\n", bell_keyrate(lam, 0.1));

  // Advantage distillation on blocks of four.
  const ADResult ad = advantage_distill(lam, 4);
  std::printf("AD m=4: p_succ = %.6f, QBER %.4f -> %.6f\n", ad.p_succ, lam.qber(), ad.qber_out);

  // Weak coherent pulses over 20 km with the optimal mean photon number.
  WcpEvaluator ev;
  ChannelParams c;
  c.length = 20.0;
  for (bool decoy : {false, true}) {
    const MuOptimum best = optimize_mu(ev, Protocol::bb84, c, decoy, QMode{});
    std::printf("bb84 %-8s mu* = %.4f, rate = %.3e bits/pulse\n", decoy ? "decoy" : "no-decoy", best.mu,
                best.bound.value);
  }
  return 0;
}
