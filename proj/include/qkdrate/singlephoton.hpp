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

// Single-photon bounds. Each protocol fixes a set of Bell-diagonal states
// compatible with the observed QBER; the key rate is the infimum of the
// one-way bound over that set.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <boost/multiprecision/mpfr.hpp>

#include "qkdrate/bell_diagonal.hpp"
#include "qkdrate/bellcore.hpp"
#include "qkdrate/entropy.hpp"
#include "qkdrate/error.hpp"
#include "qkdrate/optimize.hpp"
#include "qkdrate/postproc.hpp"
#include "qkdrate/protocol.hpp"
#include "qkdrate/rate_bound.hpp"

namespace qkdrate {

/// Which implementation evaluates S(U|E) for a Bell-diagonal state.
enum class EntropyRoute { closed_form, engine };

inline double bell_s_u_given_e(const BellDiagonal& lam, double q, EntropyRoute route) {
  if (route == EntropyRoute::engine) return s_u_given_e(bell_decomposition(lam, q));
  return bell_s_u_given_e<double>(lam, q);
}

inline double bell_keyrate(const BellDiagonal& lam, double q, EntropyRoute route) {
  if (route == EntropyRoute::engine) return keyrate_two_qubit(bell_decomposition(lam, q)).value;
  return bell_keyrate<double>(lam, q);
}

/// One-parameter family of states with a fixed QBER, indexed by lambda11.
struct GammaFamily {
  Protocol protocol = Protocol::bb84;
  double qber = 0.0;
  double lambda11_min = 0.0;
  double lambda11_max = 0.0;

  bool singleton() const { return !(lambda11_max > lambda11_min); }

  BellDiagonal at(double l11) const {
    if (l11 < lambda11_min - kProbabilitySlack || l11 > lambda11_max + kProbabilitySlack)
      throw DomainError("GammaFamily: lambda11 outside the family range");
    l11 = std::clamp(l11, lambda11_min, lambda11_max);
    const double q = qber;
    if (protocol == Protocol::sarg) {
      const double l01 = std::max(0.0, q / (2.0 * (1.0 - q)) - l11);
      return BellDiagonal(1.0 - q / (1.0 - q) + l11, l01, l01, l11);
    }
    const double l01 = std::max(0.0, q - l11);
    return BellDiagonal(1.0 - 2.0 * q + l11, l01, l01, l11);
  }
};

inline GammaFamily gamma_bb84(double qber) {
  if (!(qber >= 0.0 && qber <= 0.5)) throw DomainError("gamma_bb84: QBER must lie in [0, 0.5]");
  return GammaFamily{Protocol::bb84, qber, 0.0, qber};
}

/// Isotropic state, the one symmetric under the six-state measurements.
template <class Real = double>
BasicBellDiagonal<Real> gamma_sixstate(const Real& qber) {
  if (!(qber >= Real(0) && qber <= Real(2) / Real(3)))
    throw DomainError("gamma_sixstate: QBER must lie in [0, 2/3]");
  const Real h = qber / Real(2);
  return BasicBellDiagonal<Real>::unchecked({Real(1) - Real(3) * h, h, h, h});
}

/// States whose filtered statistics show QBER `qber`. Accepted up to 1/2.
inline GammaFamily gamma_sarg1(double qber) {
  if (!(qber >= 0.0 && qber <= 0.5)) throw DomainError("gamma_sarg1: QBER must lie in [0, 0.5]");
  return GammaFamily{Protocol::sarg, qber, 0.0, qber / (2.0 * (1.0 - qber))};
}

struct FamilyInfimum {
  double value = 0.0;
  double lambda11 = 0.0;
};

inline constexpr std::size_t kFamilyGridPoints = 201;

/// Infimum of f(state) over the family: a uniform grid in lambda11 followed by
/// golden-section refinement around the best grid point.
template <class F>
FamilyInfimum family_infimum(const GammaFamily& fam, F&& f) {
  if (fam.singleton()) return {f(fam.at(fam.lambda11_min)), fam.lambda11_min};
  const auto grid = opt::linspace(fam.lambda11_min, fam.lambda11_max, kFamilyGridPoints);
  const auto best = opt::grid_then_golden([&](double l11) { return f(fam.at(l11)); }, grid, opt::Goal::minimize);
  return {best.fx, best.x};
}

/// S_1 for BB84: 1 - h(Q) at q = 0, otherwise the infimum of S(U|E) over the
/// family.
inline FamilyInfimum s1_bb84_infimum(double qber, double q, EntropyRoute route = EntropyRoute::closed_form) {
  if (!(q >= 0.0 && q <= 0.5)) throw DomainError("s1_bb84: q must lie in [0, 0.5]");
  const GammaFamily fam = gamma_bb84(qber);
  return family_infimum(fam, [&](const BellDiagonal& lam) { return bell_s_u_given_e(lam, q, route); });
}

inline double s1_bb84(double qber, double q, EntropyRoute route = EntropyRoute::closed_form) {
  if (q == 0.0) {
    gamma_bb84(qber);
    return 1.0 - binary_entropy(qber);
  }
  return s1_bb84_infimum(qber, q, route).value;
}

// ---------------------------------------------------------------------------
// SARG: filtering by A1 (x) B1 followed by the z-z twirl.
// ---------------------------------------------------------------------------

struct SargFilteredState {
  BellDiagonal input;
  double weight = 0.0;      // trace after filtering, before renormalization
  TripartiteOperator abe;   // normalized state on A (x) B (x) E, dim_e = 4

  /// Probability that Alice's and Bob's computational-basis outcomes differ.
  double qber() const {
    const CMatrix& m = abe.rho.matrix();
    double s = 0.0;
    for (std::size_t e = 0; e < 4; ++e) s += m(1 * 4 + e, 1 * 4 + e).real() + m(2 * 4 + e, 2 * 4 + e).real();
    return s;
  }
};

namespace detail {

inline CMatrix sarg_filter_ab() {
  const double r = 1.0 / std::sqrt(2.0);
  CMatrix a1(2), b1(2);
  // A1 = |0><0_z| + |1><0_x|
  a1(0, 0) = 1.0;
  a1(1, 0) = r;
  a1(1, 1) = r;
  // B1 = |0><1_x| + |1><1_z|
  b1(0, 0) = r;
  b1(0, 1) = -r;
  b1(1, 1) = 1.0;
  return kron(a1, b1);
}

}  // namespace detail

inline SargFilteredState sarg_filtered_state(const BellDiagonal& lam) {
  static const CMatrix filter = detail::sarg_filter_ab();
  const TripartitePure psi = purify_bell_diagonal(lam);
  std::vector<Complex> v(16), w(16);
  for (std::size_t ab = 0; ab < 4; ++ab)
    for (std::size_t k = 0; k < 4; ++k) {
      const Complex f = filter(ab, k);
      if (f == Complex(0.0)) continue;
      for (std::size_t e = 0; e < 4; ++e) v[ab * 4 + e] += f * psi.amplitudes[k * 4 + e];
    }
  // sigma_z (x) sigma_z flips the sign of the components with a != b.
  for (std::size_t ab = 0; ab < 4; ++ab) {
    const double sign = (ab == 1 || ab == 2) ? -1.0 : 1.0;
    for (std::size_t e = 0; e < 4; ++e) w[ab * 4 + e] = sign * v[ab * 4 + e];
  }
  CMatrix rho = CMatrix::outer(v) + CMatrix::outer(w);
  rho = rho * Complex(0.5);
  const double weight = rho.trace().real();
  if (!(weight > kZeroWeightThreshold)) throw ZeroWeightError("sarg_filtered_state: input is filtered out completely");
  return SargFilteredState{lam, weight, TripartiteOperator{DensityOperator(rho * Complex(1.0 / weight)), 4}};
}

/// S_1 for SARG: infimum of S(U|E) on the filtered state over the family.
inline FamilyInfimum s1_sarg_infimum(double qber, double q) {
  if (!(q >= 0.0 && q <= 0.5)) throw DomainError("s1_sarg: q must lie in [0, 0.5]");
  const GammaFamily fam = gamma_sarg1(qber);
  return family_infimum(fam, [&](const BellDiagonal& lam) {
    return s_u_given_e(measure_and_randomize(sarg_filtered_state(lam).abe, q));
  });
}

inline double s1_sarg(double qber, double q) { return s1_sarg_infimum(qber, q).value; }

/// Single-photon SARG bound per sifted bit at QBER `qber`.
inline RateBound rate_sarg1(double qber, double q) {
  if (!(q >= 0.0 && q <= 0.5)) throw DomainError("rate_sarg1: q must lie in [0, 0.5]");
  const GammaFamily fam = gamma_sarg1(qber);
  const FamilyInfimum inf = family_infimum(fam, [&](const BellDiagonal& lam) {
    return keyrate_two_qubit(measure_and_randomize(sarg_filtered_state(lam).abe, q)).value;
  });
  RateBound r;
  r.value = inf.value;
  r.witness["lambda11"] = inf.lambda11;
  r.witness["q"] = q;
  return r;
}

// ---------------------------------------------------------------------------
// SARG two-photon pulses.
// ---------------------------------------------------------------------------

inline double sarg_g(double x) {
  return (3.0 - 2.0 * x + std::sqrt(6.0 - 6.0 * std::sqrt(2.0) * x + 4.0 * x * x)) / 6.0;
}

/// Largest phase error compatible with the two-photon error rate Q2.
inline double sarg_bigB(double q2) {
  if (!(q2 >= 0.0 && q2 <= 2.0 / 3.0)) throw DomainError("sarg_bigB: Q2 must lie in [0, 2/3]");
  return 0.5 + 0.5 * std::sqrt(q2 * (1.0 - 1.5 * q2)) - std::sqrt(2.0) / 4.0 * (1.0 - 3.0 * q2);
}

inline constexpr double kSargTwoPhotonLimit = 1.0 / 6.0;

inline BellDiagonal sarg2_worst_state(double q2) {
  if (!(q2 >= 0.0 && q2 <= kSargTwoPhotonLimit)) throw DomainError("sarg2_worst_state: Q2 must lie in [0, 1/6]");
  const double b = std::min(0.5, sarg_bigB(q2));
  const double l11 = q2 * b;
  const double l01 = b - l11;
  return BellDiagonal(1.0 - q2 - l01, l01, q2 - l11, l11);
}

struct S2Value {
  double value = 0.0;
  bool full_information = false;  // Eve learns the bit completely
};

inline S2Value s2_sarg(double q2) {
  if (!(q2 >= 0.0 && q2 <= 0.5)) throw DomainError("s2_sarg: Q2 must lie in [0, 0.5]");
  if (q2 >= kSargTwoPhotonLimit) return {0.0, true};
  return {1.0 - binary_entropy(std::min(0.5, sarg_bigB(q2))), false};
}

/// S_2 with Alice's randomization q. Above Q2 = 1/6 Eve holds the bit and
/// only the added noise remains, h(q).
inline double s2_sarg(double q2, double q) {
  if (!(q >= 0.0 && q <= 0.5)) throw DomainError("s2_sarg: q must lie in [0, 0.5]");
  if (q == 0.0) return s2_sarg(q2).value;
  if (!(q2 >= 0.0 && q2 <= 0.5)) throw DomainError("s2_sarg: Q2 must lie in [0, 0.5]");
  if (q2 >= kSargTwoPhotonLimit) return binary_entropy(q);
  return bell_s_u_given_e<double>(sarg2_worst_state(q2), q);
}

// ---------------------------------------------------------------------------
// Tolerable QBER.
// ---------------------------------------------------------------------------

using PreciseReal = boost::multiprecision::mpfr_float_100;

inline constexpr double kPositiveTolerance = 1e-12;
inline constexpr double kPrecisePositiveTolerance = 1e-60;

struct ThresholdRequest {
  Protocol protocol = Protocol::bb84;
  bool optimize_q = false;
  double q = 0.0;                // used when optimize_q is false
  std::vector<int> ad_blocks;    // empty: no advantage distillation
  bool xor3 = false;
  double tolerance = 1e-4;
};

struct RateAtQber {
  double value = 0.0;  // best bound per raw-key bit
  double q = 0.0;
  int ad_block = 1;
  bool positive = false;
};

struct ThresholdResult {
  double qber = 0.0;
  double last_positive = 0.0;
  double first_nonpositive = 0.0;
  std::size_t trace_length = 0;
  RateAtQber witness;  // at last_positive
};

namespace detail {

// Randomization values tried before golden refinement. The precise path
// also probes q down to 1e-30, where long AD blocks put their optimum.
inline std::vector<double> q_candidates(bool precise) {
  std::vector<double> qs = opt::linspace(0.0, 0.5, 51);
  const int low = precise ? 30 : 8;
  for (int k = 2; k <= low; ++k) {
    qs.push_back(std::pow(10.0, -k));
    qs.push_back(3.0 * std::pow(10.0, -k));
  }
  const int high = precise ? 12 : 6;
  for (int k = 3; k <= high; ++k) qs.push_back(0.5 - std::pow(10.0, -k));
  std::sort(qs.begin(), qs.end());
  qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
  return qs;
}

template <class F>
opt::Optimum maximize_over_q(F&& f, bool precise) {
  return opt::grid_then_golden(f, q_candidates(precise), opt::Goal::maximize, 1e-9);
}

template <class Real>
BasicBellDiagonal<Real> bell_family_state(Protocol p, const Real& qber, const Real& l11) {
  if (p == Protocol::six_state) return gamma_sixstate<Real>(qber);
  return BasicBellDiagonal<Real>::unchecked({Real(1) - Real(2) * qber + l11, qber - l11, qber - l11, l11});
}

// Two-way processed bound for a Bell-diagonal family at fixed (m, q), per
// raw-key bit, evaluated at high precision; returned as double (the
// magnitude, however small, survives the conversion).
inline double precise_family_rate(Protocol p, double qber, const PostProcessing& pp, double q) {
  const PreciseReal pq(q);
  const PreciseReal pQ(qber);
  auto at = [&](double l11) {
    const auto lam = bell_family_state<PreciseReal>(p, pQ, PreciseReal(l11));
    return static_cast<double>(keyrate_after_ad_precise(lam, pp, pq).second);
  };
  if (p == Protocol::six_state) return at(0.0);
  const auto grid = opt::linspace(0.0, qber, 21);
  return opt::grid_then_golden(at, grid, opt::Goal::minimize, 1e-6).fx;
}

inline double single_rate(Protocol p, double qber, double q) {
  switch (p) {
    case Protocol::six_state: return bell_keyrate<double>(gamma_sixstate(qber), q);
    case Protocol::bb84: {
      const double h = binary_entropy((1.0 - q) * qber + q * (1.0 - qber));
      return s1_bb84(qber, q) - h;
    }
    case Protocol::sarg: return rate_sarg1(qber, q).value;
  }
  return 0.0;
}

}  // namespace detail

/// Best bound at a given QBER over the allowed randomization and AD blocks.
inline RateAtQber best_rate_at(const ThresholdRequest& req, double qber) {
  const bool two_way = !req.ad_blocks.empty() || req.xor3;
  if (two_way && req.protocol == Protocol::sarg)
    throw DomainError("threshold: block post-processing is available for bb84 and six-state only");
  if (!req.optimize_q && !(req.q >= 0.0 && req.q <= 0.5)) throw DomainError("threshold: q must lie in [0, 0.5]");

  RateAtQber best;
  best.value = -1e300;
  if (!two_way) {
    auto f = [&](double q) { return detail::single_rate(req.protocol, qber, q); };
    if (req.optimize_q) {
      const auto o = detail::maximize_over_q(f, false);
      best.value = o.fx;
      best.q = o.x;
    } else {
      best.value = f(req.q);
      best.q = req.q;
    }
    best.positive = best.value > kPositiveTolerance;
    return best;
  }

  std::vector<int> blocks = req.ad_blocks.empty() ? std::vector<int>{1} : req.ad_blocks;
  std::sort(blocks.begin(), blocks.end(), std::greater<>());
  for (int m : blocks) {
    if (m < 1) throw DomainError("threshold: AD block sizes must be positive");
    const PostProcessing pp{m, req.xor3};
    auto f = [&](double q) { return detail::precise_family_rate(req.protocol, qber, pp, q); };
    double v, q;
    if (req.optimize_q) {
      const auto o = detail::maximize_over_q(f, true);
      v = o.fx;
      q = o.x;
    } else {
      v = f(req.q);
      q = req.q;
    }
    if (v > best.value) best = RateAtQber{v, q, m, false};
    // Long blocks win near the threshold; stop at the first positive one.
    if (v > kPrecisePositiveTolerance) break;
  }
  best.positive = best.value > kPrecisePositiveTolerance;
  return best;
}

/// Largest QBER with a positive bound, by bisection on [0, 1/2].
inline ThresholdResult threshold(const ThresholdRequest& req) {
  auto f = [&](double qber) { return best_rate_at(req, qber).positive ? 1.0 : -1.0; };
  opt::SearchSpec spec{0.0, 0.5, req.tolerance, 200};
  const auto b = opt::bisect_sign_change(f, spec);
  ThresholdResult r;
  r.qber = b.root;
  r.last_positive = b.lo;
  r.first_nonpositive = b.hi;
  r.trace_length = b.trace.size();
  r.witness = best_rate_at(req, b.lo);
  return r;
}

}  // namespace qkdrate
