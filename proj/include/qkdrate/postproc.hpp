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

// Two-way classical post-processing on Bell-diagonal states: advantage
// distillation (AD) over blocks of m pairs and parity (XOR) blocks of three,
// with exhaustive enumeration oracles for both and a finite-size check of the
// block-permutation argument.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <utility>

#include "qkdrate/bell_diagonal.hpp"
#include "qkdrate/bellcore.hpp"
#include "qkdrate/error.hpp"
#include "qkdrate/rate_bound.hpp"

namespace qkdrate {

template <class Real>
struct BasicADResult {
  BasicBellDiagonal<Real> lam_out;
  Real p_succ;    // probability that a block is kept
  Real qber_out;  // QBER of the kept bits
  int block_size = 1;
};

using ADResult = BasicADResult<double>;

/// Advantage distillation with blocks of m pairs. The block sums are
/// rescaled by their maximum before exponentiation so that m up to 1e4 stays
/// finite; p_succ itself may underflow to zero for very long blocks.
template <class Real>
BasicADResult<Real> advantage_distill(const BasicBellDiagonal<Real>& lam, int m) {
  if (m < 1) throw DomainError("advantage_distill: block size must be at least 1");
  using std::pow;
  std::array<Real, 2> s{lam(0, 0) + lam(0, 1), lam(1, 0) + lam(1, 1)};
  std::array<Real, 2> d{lam(0, 0) - lam(0, 1), lam(1, 0) - lam(1, 1)};
  const Real scale = s[0] > s[1] ? s[0] : s[1];
  std::array<Real, 2> sm, dm;
  for (int i = 0; i < 2; ++i) {
    sm[i] = pow(Real(s[i] / scale), m);
    dm[i] = pow(Real(d[i] / scale), m);
  }
  const Real t = Real(2) * (sm[0] + sm[1]);
  std::array<Real, 4> out;
  for (int i = 0; i < 2; ++i) {
    out[2 * i] = (sm[i] + dm[i]) / t;
    out[2 * i + 1] = (sm[i] - dm[i]) / t;
  }
  BasicADResult<Real> r{BasicBellDiagonal<Real>::unchecked(out), pow(s[0], m) + pow(s[1], m),
                        sm[1] / (sm[0] + sm[1]), m};
  return r;
}

inline constexpr int kMaxOracleBlock = 8;

/// Unnormalized outcome masses of one AD block under i.i.d. weights:
/// entries 0..3 are the kept Bell indices, entry 4 the discarded mass.
inline std::array<double, 5> ad_block_masses(const BellDiagonal& lam, int m) {
  if (m < 1) throw DomainError("ad_oracle: block size must be at least 1");
  if (m > kMaxOracleBlock) throw SizeLimitError("ad_oracle: block size too large to enumerate");
  std::array<double, 5> mass{};
  const std::uint32_t total = 1u << (2 * m);
  for (std::uint32_t code = 0; code < total; ++code) {
    double w = 1.0;
    int bits = 0;
    int phase = 0;
    for (int k = 0; k < m; ++k) {
      const std::uint32_t idx = (code >> (2 * k)) & 3u;
      w *= lam[idx];
      bits |= 1 << static_cast<int>(idx >> 1);
      phase ^= static_cast<int>(idx & 1u);
    }
    if (bits == 3) {
      mass[4] += w;
    } else {
      mass[static_cast<std::size_t>(2 * (bits == 2 ? 1 : 0) + phase)] += w;
    }
  }
  return mass;
}

/// Enumerates all 4^m index strings of a block; the block survives when every
/// bit index agrees and its phase index is the parity of the phase indices.
inline BellDiagonal ad_oracle(const BellDiagonal& lam, int m) {
  const auto mass = ad_block_masses(lam, m);
  const double kept = mass[0] + mass[1] + mass[2] + mass[3];
  if (!(kept > 0.0)) throw ZeroWeightError("ad_oracle: no block survives");
  return BellDiagonal::unchecked({mass[0] / kept, mass[1] / kept, mass[2] / kept, mass[3] / kept});
}

/// Parity over blocks of three pairs, closed form.
template <class Real>
BasicBellDiagonal<Real> xor_three(const BasicBellDiagonal<Real>& lam) {
  std::array<Real, 4> out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const Real& a = lam(i, j);
      const Real& b = lam(i, j + 1);
      const Real& c = lam(i + 1, j);
      const Real& e = lam(i + 1, j + 1);
      out[static_cast<std::size_t>(2 * i + j)] =
          a * a * (a + Real(3) * b) + Real(3) * c * c * (a + b) + Real(6) * a * c * e;
    }
  return BasicBellDiagonal<Real>::unchecked(out);
}

/// Parity over blocks of three pairs by enumerating the 64 index triples.
inline BellDiagonal xor_oracle(const BellDiagonal& lam) {
  std::array<double, 4> out{};
  for (int code = 0; code < 64; ++code) {
    const int i = (code >> 5) & 1, j = (code >> 4) & 1;
    const int k = (code >> 3) & 1, l = (code >> 2) & 1;
    const int m = (code >> 1) & 1, n = code & 1;
    const double w = lam(i, j) * lam(k, l) * lam(m, n);
    const int bit = i ^ k ^ m;
    const int phase = j ^ ((l ^ j) & (n ^ j));
    out[static_cast<std::size_t>(2 * bit + phase)] += w;
  }
  return BellDiagonal::unchecked(out);
}

/// Block post-processing applied before the one-way step: AD first, then
/// the parity block.
struct PostProcessing {
  int ad_block = 1;
  bool xor3 = false;
};

template <class Real>
struct BasicProcessedState {
  BasicBellDiagonal<Real> lam;
  Real yield;  // distilled bits per raw-key bit
};

template <class Real>
BasicProcessedState<Real> apply_postprocessing(const BasicBellDiagonal<Real>& lam, const PostProcessing& pp) {
  BasicProcessedState<Real> st{lam, Real(1)};
  if (pp.ad_block > 1) {
    const auto ad = advantage_distill(lam, pp.ad_block);
    st.lam = ad.lam_out;
    st.yield = ad.p_succ / Real(pp.ad_block);
  } else if (pp.ad_block < 1) {
    throw DomainError("apply_postprocessing: block size must be at least 1");
  }
  if (pp.xor3) {
    st.lam = xor_three(st.lam);
    st.yield = st.yield / Real(3);
  }
  return st;
}

struct ADKeyRate {
  RateBound per_distilled;
  RateBound per_raw;
  ADResult ad;
};

/// One-way bound on the distilled state, through the density-matrix engine.
inline ADKeyRate keyrate_after_ad(const BellDiagonal& lam, int m, double q) {
  const ADResult ad = advantage_distill(lam, m);
  ADKeyRate r{keyrate_two_qubit(bell_decomposition(ad.lam_out, q)), {}, ad};
  r.per_distilled.unit = RateUnit::per_distilled_bit;
  r.per_distilled.witness["m"] = m;
  r.per_distilled.witness["p_succ"] = ad.p_succ;
  r.per_raw = r.per_distilled;
  r.per_raw.unit = RateUnit::per_raw_bit;
  r.per_raw.value = r.per_distilled.value * ad.p_succ / m;
  return r;
}

/// Same bound through the Bell-diagonal closed form at any precision.
/// Returns (per distilled bit, per raw-key bit).
template <class Real>
std::pair<Real, Real> keyrate_after_ad_precise(const BasicBellDiagonal<Real>& lam, const PostProcessing& pp,
                                               const Real& q) {
  const auto st = apply_postprocessing(lam, pp);
  const Real v = bell_keyrate(st.lam, q);
  return {v, v * st.yield};
}

// ---------------------------------------------------------------------------
// Finite-size check: a fixed multiset of Bell indices, uniformly permuted and
// cut into blocks, against independent blocks drawn from its frequencies.
// ---------------------------------------------------------------------------

inline constexpr int kMaxLemmaPairs = 16;

/// Distribution of (n1..n4), the number of kept blocks ending in each Bell
/// index, over n_blocks blocks.
struct TypeClassDistribution {
  int blocks = 0;
  std::map<std::array<int, 4>, double> prob;

  double total() const {
    double s = 0.0;
    for (const auto& [k, p] : prob) s += p;
    return s;
  }

  /// Mass of the types whose frequencies n_k / blocks are within eps of
  /// `center` in the max-norm.
  double mass_in_ball(const std::array<double, 4>& center, double eps) const {
    double s = 0.0;
    for (const auto& [k, p] : prob) {
      double dev = 0.0;
      for (std::size_t i = 0; i < 4; ++i)
        dev = std::max(dev, std::abs(static_cast<double>(k[i]) / blocks - center[i]));
      if (dev <= eps) s += p;
    }
    return s;
  }

  /// Expected fraction of blocks with each outcome (index 4 is discard).
  std::array<double, 5> block_marginal() const {
    std::array<double, 5> m{};
    for (const auto& [k, p] : prob) {
      int kept = 0;
      for (std::size_t i = 0; i < 4; ++i) {
        m[i] += p * k[i] / blocks;
        kept += k[i];
      }
      m[4] += p * (blocks - kept) / static_cast<double>(blocks);
    }
    return m;
  }
};

struct Lemma1Check {
  double tv_distance = 0.0;         // per-block outcome law vs the i.i.d. block law
  double concentrated_mass = 0.0;   // exact mass inside the ball of radius epsilon
  double type_tv_distance = 0.0;    // full type-class law vs the multinomial
  double epsilon = 0.0;
  TypeClassDistribution exact;
  TypeClassDistribution iid;
  std::array<double, 5> iid_block{};
};

namespace detail {

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline int block_outcome(const std::array<int, 4>& c) {
  const bool has0 = c[0] + c[1] > 0;
  const bool has1 = c[2] + c[3] > 0;
  if (has0 && has1) return 4;
  const int bit = has1 ? 1 : 0;
  const int phase = (c[1] + c[3]) & 1;
  return 2 * bit + phase;
}

template <class Visit>
void for_each_composition(int m, Visit&& visit) {
  std::array<int, 4> c{};
  for (c[0] = 0; c[0] <= m; ++c[0])
    for (c[1] = 0; c[0] + c[1] <= m; ++c[1])
      for (c[2] = 0; c[0] + c[1] + c[2] <= m; ++c[2]) {
        c[3] = m - c[0] - c[1] - c[2];
        visit(c);
      }
}

}  // namespace detail

inline Lemma1Check lemma1_check(const std::array<int, 4>& counts, int m) {
  int n = 0;
  for (int c : counts) {
    if (c < 0) throw DomainError("lemma1_check: negative count");
    n += c;
  }
  if (n == 0) throw DomainError("lemma1_check: empty multiset");
  if (n > kMaxLemmaPairs) throw SizeLimitError("lemma1_check: too many pairs to enumerate");
  if (m < 1 || n % m != 0) throw DomainError("lemma1_check: block size must divide the number of pairs");
  const int nb = n / m;

  // Blocks are drawn one after another without replacement.
  using State = std::pair<std::array<int, 4>, std::array<int, 5>>;
  std::map<State, double> st{{State{counts, {}}, 1.0}};
  for (int b = 0; b < nb; ++b) {
    std::map<State, double> next;
    for (const auto& [s, p] : st) {
      const auto& rem = s.first;
      const int left = rem[0] + rem[1] + rem[2] + rem[3];
      const double denom = detail::binomial(left, m);
      detail::for_each_composition(m, [&](const std::array<int, 4>& c) {
        double w = 1.0;
        for (std::size_t k = 0; k < 4; ++k) {
          if (c[k] > rem[k]) return;
          w *= detail::binomial(rem[k], c[k]);
        }
        State ns = s;
        for (std::size_t k = 0; k < 4; ++k) ns.first[k] -= c[k];
        ns.second[static_cast<std::size_t>(detail::block_outcome(c))] += 1;
        next[ns] += p * w / denom;
      });
    }
    st = std::move(next);
  }

  Lemma1Check r;
  r.exact.blocks = nb;
  for (const auto& [s, p] : st) r.exact.prob[{s.second[0], s.second[1], s.second[2], s.second[3]}] += p;

  const double dn = static_cast<double>(n);
  const BellDiagonal lam(counts[0] / dn, counts[1] / dn, counts[2] / dn, counts[3] / dn);
  r.iid_block = ad_block_masses(lam, m);

  // Multinomial over the five block outcomes; the discard count is implied.
  r.iid.blocks = nb;
  std::array<int, 5> k{};
  for (k[0] = 0; k[0] <= nb; ++k[0])
    for (k[1] = 0; k[0] + k[1] <= nb; ++k[1])
      for (k[2] = 0; k[0] + k[1] + k[2] <= nb; ++k[2])
        for (k[3] = 0; k[0] + k[1] + k[2] + k[3] <= nb; ++k[3]) {
          k[4] = nb - k[0] - k[1] - k[2] - k[3];
          double w = 1.0;
          int left = nb;
          for (std::size_t i = 0; i < 5; ++i) {
            w *= detail::binomial(left, k[i]) * std::pow(r.iid_block[i], k[i]);
            left -= k[i];
          }
          if (w > 0.0) r.iid.prob[{k[0], k[1], k[2], k[3]}] += w;
        }

  std::map<std::array<int, 4>, std::pair<double, double>> joint;
  for (const auto& [key, p] : r.exact.prob) joint[key].first = p;
  for (const auto& [key, p] : r.iid.prob) joint[key].second = p;
  for (const auto& [key, pq] : joint) r.type_tv_distance += 0.5 * std::abs(pq.first - pq.second);

  const auto marginal = r.exact.block_marginal();
  for (std::size_t i = 0; i < 5; ++i) r.tv_distance += 0.5 * std::abs(marginal[i] - r.iid_block[i]);

  r.epsilon = std::pow(static_cast<double>(nb), -1.0 / 3.0);
  r.concentrated_mass =
      r.exact.mass_in_ball({r.iid_block[0], r.iid_block[1], r.iid_block[2], r.iid_block[3]}, r.epsilon);
  return r;
}

}  // namespace qkdrate
