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

// Self-check suites run by `verify`: closed forms against exhaustive
// enumerations and against the density-matrix engine.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qkdrate/qkdrate.hpp"

namespace qkdrate::cli {

struct SuiteResult {
  std::string name;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct VerifyOptions {
  bool perturb_ad = false;  // adds 1e-6 to one AD weight; the AD suite must catch it
};

namespace detail {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  BellDiagonal bell() {
    std::array<double, 3> c{uniform(), uniform(), uniform()};
    std::sort(c.begin(), c.end());
    return BellDiagonal(c[0], c[1] - c[0], c[2] - c[1], 1.0 - c[2]);
  }

 private:
  std::mt19937_64 gen_;
};

inline double max_abs_diff(const BellDiagonal& a, const BellDiagonal& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < 4; ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

inline SuiteResult finish(std::string name, double dev, double tol) {
  return {std::move(name), dev, tol, dev <= tol};
}

}  // namespace detail

inline SuiteResult verify_ad(const VerifyOptions& o) {
  detail::Sampler rng(11);
  double dev = 0.0;
  for (int s = 0; s < 50; ++s) {
    const BellDiagonal lam = rng.bell();
    for (int m = 1; m <= 6; ++m) {
      auto w = advantage_distill(lam, m).lam_out.weights();
      if (o.perturb_ad) w[0] += 1e-6;
      dev = std::max(dev, detail::max_abs_diff(BellDiagonal::unchecked(w), ad_oracle(lam, m)));
    }
  }
  return detail::finish("advantage distillation vs enumeration", dev, 1e-12);
}

inline SuiteResult verify_xor() {
  detail::Sampler rng(12);
  double dev = 0.0;
  for (int s = 0; s < 50; ++s) {
    const BellDiagonal lam = rng.bell();
    dev = std::max(dev, detail::max_abs_diff(xor_three(lam), xor_oracle(lam)));
  }
  return detail::finish("xor blocks vs enumeration", dev, 1e-12);
}

inline SuiteResult verify_bell_identity() {
  detail::Sampler rng(13);
  double dev = 0.0;
  for (int s = 0; s < 100; ++s) {
    const BellDiagonal lam = rng.bell();
    const double engine = keyrate_two_qubit(bell_decomposition(lam, 0.0)).value;
    dev = std::max(dev, std::abs(engine - (1.0 - lam.entropy())));
  }
  return detail::finish("engine rate vs 1 - H(lambda)", dev, 1e-9);
}

inline SuiteResult verify_randomized_closed_form() {
  detail::Sampler rng(14);
  double dev = 0.0;
  for (int s = 0; s < 100; ++s) {
    const BellDiagonal lam = rng.bell();
    const double q = rng.uniform(0.0, 0.5);
    const double engine = s_u_given_e(bell_decomposition(lam, q));
    dev = std::max(dev, std::abs(engine - bell_s_u_given_e<double>(lam, q)));
  }
  return detail::finish("engine S(U|E) vs closed form with randomization", dev, 1e-9);
}

inline SuiteResult verify_lemma1_trend() {
  double prev = 1.0;
  double worst_increase = 0.0;
  for (int n : {4, 8, 12}) {
    const double tv = lemma1_check({n / 2, 0, n / 2, 0}, 2).tv_distance;
    worst_increase = std::max(worst_increase, tv - prev);
    prev = tv;
  }
  return detail::finish("block concentration trend", std::max(0.0, worst_increase), 0.0);
}

inline SuiteResult verify_channel_series() {
  detail::Sampler rng(15);
  double dev = 0.0;
  for (int s = 0; s < 50; ++s) {
    ChannelParams c;
    c.length = rng.uniform(0.0, 150.0);
    c.eta_det = rng.uniform(0.01, 1.0);
    c.p_dark = std::pow(10.0, rng.uniform(-8.0, -3.0));
    c.visibility = rng.uniform(0.8, 1.0);
    c.mu = rng.uniform(0.01, 1.0);
    for (Protocol p : {Protocol::bb84, Protocol::sarg}) {
      const PulseObservables o = observables(p, c, true);
      double r = 0.0, rq = 0.0;
      for (const auto& t : o.per_n) {
        r += poisson_pn(c.mu, t.n) * t.yield;
        rq += poisson_pn(c.mu, t.n) * t.error_yield;
      }
      dev = std::max({dev, std::abs(r - o.r_mu), std::abs(rq - o.r_mu * o.q_mu)});
    }
  }
  return detail::finish("channel totals vs photon-number series", dev, 1e-10);
}

inline std::vector<SuiteResult> run_verify(const VerifyOptions& o) {
  return {verify_ad(o),           verify_xor(),          verify_bell_identity(), verify_randomized_closed_form(),
          verify_lemma1_trend(), verify_channel_series()};
}

}  // namespace qkdrate::cli
