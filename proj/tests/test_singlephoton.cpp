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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "qkdrate/optimize.hpp"
#include "qkdrate/singlephoton.hpp"
#include "test_support.hpp"

namespace qkdrate {
namespace {

TEST(GammaFamilies, EveryMemberShowsTheObservedQber) {
  for (double q : {0.0, 0.01, 0.05, 0.11, 0.2, 0.35, 0.5}) {
    const GammaFamily fam = gamma_bb84(q);
    for (double l11 : opt::linspace(fam.lambda11_min, fam.lambda11_max, 21))
      EXPECT_NEAR(fam.at(l11).qber(), q, 1e-12);
  }
  for (double q : {0.0, 0.05, 0.1, 0.2, 0.5}) {
    const GammaFamily fam = gamma_sarg1(q);
    for (double l11 : opt::linspace(fam.lambda11_min, fam.lambda11_max, 11)) {
      const BellDiagonal lam = fam.at(l11);
      EXPECT_NEAR(lam.l00() + lam.l01() + lam.l10() + lam.l11(), 1.0, 1e-12);
      EXPECT_NEAR(sarg_filtered_state(lam).qber(), q, 1e-12) << "Q=" << q << " l11=" << l11;
    }
  }
  EXPECT_NEAR(gamma_sixstate(0.2).l00(), 0.7, 1e-15);
  EXPECT_NEAR(gamma_sixstate(0.2).l11(), 0.1, 1e-15);
  EXPECT_NEAR(gamma_sixstate(0.5).l00(), 0.25, 1e-15);
  EXPECT_NEAR(gamma_sixstate(0.5).l11(), 0.25, 1e-15);
  EXPECT_NEAR(gamma_sixstate(2.0 / 3.0).l00(), 0.0, 1e-15);
  EXPECT_NEAR(gamma_sixstate(2.0 / 3.0).l01(), 1.0 / 3.0, 1e-15);
}

TEST(GammaFamilies, Examples) {
  EXPECT_TRUE(gamma_bb84(0.0).singleton());
  EXPECT_TRUE(gamma_sarg1(0.0).singleton());
  const BellDiagonal a = gamma_bb84(0.1).at(0.01);
  EXPECT_NEAR(a.l00(), 0.81, 1e-15);
  EXPECT_NEAR(a.l01(), 0.09, 1e-15);
  const BellDiagonal s = gamma_sarg1(0.1).at(0.0);
  EXPECT_NEAR(s.l00(), 1.0 - 1.0 / 9.0, 1e-15);
  EXPECT_NEAR(s.l01(), 1.0 / 18.0, 1e-15);
  EXPECT_NEAR(s.l10(), 1.0 / 18.0, 1e-15);
}

TEST(GammaFamilies, Errors) {
  EXPECT_THROW(gamma_bb84(0.6), DomainError);
  EXPECT_THROW(gamma_bb84(-0.1), DomainError);
  EXPECT_THROW(gamma_sixstate(0.7), DomainError);
  EXPECT_THROW(gamma_sarg1(0.51), DomainError);
  EXPECT_THROW(gamma_bb84(0.1).at(0.2), DomainError);
}

TEST(Bb84, FamilyMinimumMatchesClosedForm) {
  for (double q : {0.01, 0.05, 0.11, 0.2}) {
    const FamilyInfimum inf = s1_bb84_infimum(q, 0.0, EntropyRoute::engine);
    EXPECT_NEAR(inf.value, 1.0 - binary_entropy(q), 1e-6);
    EXPECT_NEAR(inf.lambda11, q * q, q / 200.0) << "Q=" << q;
  }
  EXPECT_NEAR(s1_bb84(0.11, 0.0), 0.500084041835472, 1e-12);
  EXPECT_NEAR(s1_bb84(0.0, 0.0), 1.0, 1e-15);
  EXPECT_NEAR(s1_bb84(0.5, 0.0), 0.0, 1e-15);
}

TEST(Bb84, RandomizedInfimumBoundedBelowByNoise) {
  for (double qber : {0.05, 0.12}) {
    for (double q : {0.05, 0.2, 0.4}) {
      EXPECT_GE(s1_bb84(qber, q), binary_entropy(q) - 1e-12);
      EXPECT_NEAR(s1_bb84(qber, q, EntropyRoute::engine), s1_bb84(qber, q), 1e-8);
    }
  }
}

// Filter and twirl rebuilt from the operator primitives.
TEST(Sarg, FilteredStateMatchesOperatorConstruction) {
  const double r = 1.0 / std::sqrt(2.0);
  CMatrix a1(2), b1(2), z(2);
  a1(0, 0) = 1.0;
  a1(1, 0) = r;
  a1(1, 1) = r;
  b1(0, 0) = r;
  b1(0, 1) = -r;
  b1(1, 1) = 1.0;
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  const CMatrix filter = kron(a1, b1);
  const CMatrix zz = kron(z, z);
  testing::Rng rng(21);
  for (int s = 0; s < 20; ++s) {
    const BellDiagonal lam = testing::random_bell(rng);
    const TripartiteOperator filtered = apply_ab(filter, purify_bell_diagonal(lam).to_operator());
    const TripartiteOperator flipped = apply_ab(zz, filtered);
    const CMatrix twirled = (filtered.rho.matrix() + flipped.rho.matrix()) * Complex(0.5);
    const double w = twirled.trace().real();
    const SargFilteredState st = sarg_filtered_state(lam);
    EXPECT_NEAR(st.weight, w, 1e-13);
    EXPECT_LT(st.abe.rho.matrix().max_abs_diff(twirled * Complex(1.0 / w)), 1e-13);
  }
}

TEST(Sarg, FilteredQberForSymmetricInputs) {
  testing::Rng rng(22);
  for (int s = 0; s < 20; ++s) {
    const double l01 = rng.uniform(0.0, 0.2);
    const double l11 = rng.uniform(0.0, 0.2);
    const BellDiagonal lam(1.0 - 2.0 * l01 - l11, l01, l01, l11);
    EXPECT_NEAR(sarg_filtered_state(lam).qber(), (l01 + l11) / (0.5 + l01 + l11), 1e-13);
  }
  EXPECT_NEAR(sarg_filtered_state(BellDiagonal(1.0, 0.0, 0.0, 0.0)).qber(), 0.0, 1e-15);
}

TEST(Sarg, SinglePhotonRateSigns) {
  EXPECT_GT(rate_sarg1(0.11, 0.0).value, 0.0);
  EXPECT_LT(rate_sarg1(0.12, 0.0).value, 0.0);
  ThresholdRequest req;
  req.protocol = Protocol::sarg;
  req.optimize_q = true;
  EXPECT_TRUE(best_rate_at(req, 0.125).positive);
}

TEST(Sarg, TwoPhotonValues) {
  EXPECT_NEAR(sarg_bigB(0.0), 0.5 - std::sqrt(2.0) / 4.0, 1e-15);
  EXPECT_NEAR(sarg_bigB(0.0), 0.146446609406726, 1e-14);
  EXPECT_NEAR(s2_sarg(0.0).value, 0.399123963307144, 1e-12);
  EXPECT_NEAR(s2_sarg(kSargTwoPhotonLimit).value, 0.0, 1e-9);
  EXPECT_TRUE(s2_sarg(0.2).full_information);
  EXPECT_NEAR(s2_sarg(0.3, 0.1), binary_entropy(0.1), 1e-15);
  // The worst-case state reproduces S2 through the generic closed form.
  for (double q2 : {0.0, 0.05, 0.1, 0.15}) {
    const BellDiagonal w = sarg2_worst_state(q2);
    EXPECT_NEAR(w.qber(), q2, 1e-14);
    EXPECT_NEAR(bell_s_u_given_e<double>(w, 0.0), s2_sarg(q2).value, 1e-10);
  }
}

// Brute-force minimization of x Q2 + g(x) over x > 0.
double bigB_oracle(double q2) {
  auto f = [q2](double lx) {
    const double x = std::exp(lx);
    return x * q2 + sarg_g(x);
  };
  const auto grid = opt::linspace(std::log(1e-6), std::log(1e8), 4001);
  return opt::grid_then_golden(f, grid, opt::Goal::minimize, 1e-12).fx;
}

TEST(Sarg, BigBMatchesBruteForce) {
  double worst = 0.0;
  for (int k = 1; k <= 166; ++k) {
    const double q2 = 1e-3 * k;
    worst = std::max(worst, std::abs(sarg_bigB(q2) - bigB_oracle(q2)));
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(Sarg, TwoPhotonDecreasing) {
  double prev = s2_sarg(0.0).value;
  for (int k = 1; k <= 166; ++k) {
    const double v = s2_sarg(1e-3 * k).value;
    EXPECT_LE(v, prev + 1e-15);
    prev = v;
  }
}

TEST(Rates, NonIncreasingInQber) {
  for (Protocol p : {Protocol::bb84, Protocol::six_state, Protocol::sarg}) {
    ThresholdRequest req;
    req.protocol = p;
    req.q = 0.1;
    double prev = best_rate_at(req, 0.0).value;
    for (double qber = 0.01; qber <= 0.2; qber += 0.01) {
      const double v = best_rate_at(req, qber).value;
      EXPECT_LE(v, prev + 1e-12) << to_string(p) << " Q=" << qber;
      prev = v;
    }
  }
}

TEST(Rates, OptimizedRandomizationNeverHurts) {
  for (Protocol p : {Protocol::bb84, Protocol::six_state}) {
    for (double qber : {0.02, 0.08, 0.12, 0.13}) {
      ThresholdRequest fixed;
      fixed.protocol = p;
      ThresholdRequest best = fixed;
      best.optimize_q = true;
      EXPECT_GE(best_rate_at(best, qber).value, best_rate_at(fixed, qber).value - 1e-12);
    }
  }
}

TEST(Rates, Bb84InteriorRandomizationOptimum) {
  ThresholdRequest req;
  req.optimize_q = true;
  const RateAtQber r = best_rate_at(req, 0.12);
  EXPECT_GT(r.q, 0.0);
}

TEST(Rates, Bb84OneWayThreshold) {
  ThresholdRequest req;
  req.tolerance = 1e-5;
  EXPECT_NEAR(threshold(req).qber, 0.110, 1e-4);
}

TEST(Rates, Errors) {
  ThresholdRequest req;
  req.protocol = Protocol::sarg;
  req.ad_blocks = {2};
  EXPECT_THROW(best_rate_at(req, 0.05), DomainError);
  EXPECT_THROW(s1_bb84(0.1, 0.6), DomainError);
  EXPECT_THROW(rate_sarg1(0.1, -0.1), DomainError);
  EXPECT_THROW(sarg2_worst_state(0.2), DomainError);
  EXPECT_THROW(parse_protocol("b92"), DomainError);
  EXPECT_EQ(parse_protocol("six-state"), Protocol::six_state);
}

}  // namespace
}  // namespace qkdrate
