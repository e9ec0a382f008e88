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

// Key-rate bounds per pulse for weak coherent pulses. Without decoy states
// Eve may attribute the observed rates to any photon-number mixture
// compatible with them; the bound is the worst case over that set. With
// decoy states (ideal limit) the per-photon-number rates are known.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "qkdrate/channel.hpp"
#include "qkdrate/entropy.hpp"
#include "qkdrate/error.hpp"
#include "qkdrate/optimize.hpp"
#include "qkdrate/protocol.hpp"
#include "qkdrate/singlephoton.hpp"

namespace qkdrate {

struct WcpBound {
  double value = 0.0;  // key bits per pulse
  bool abort = false;  // true iff value <= 0
  std::map<std::string, double> witness;
};

/// Grid resolution of the SARG search. Q values live on a lattice of
/// `unit`; the outer grid uses every `coarse_step`-th lattice point and each
/// refinement divides the step by ten around the best cell.
struct SargSearch {
  double unit = 5e-6;
  int coarse_step = 1000;  // 101 x 101 outer grid on [0, 1/2]; final step is one unit
  int refinements = 3;
};

inline double randomized_qber(double qber, double q) { return (1.0 - q) * qber + q * (1.0 - qber); }

/// Evaluates the bounds and memoizes the single-photon entropies, which
/// dominate the cost. Not thread-safe; use one evaluator per thread.
class WcpEvaluator {
 public:
  explicit WcpEvaluator(SargSearch sarg = {}) : sarg_(sarg) {
    if (sarg_.coarse_step < 1 || sarg_.refinements < 0 || !(sarg_.unit > 0.0))
      throw DomainError("SargSearch: invalid grid");
    long step = sarg_.coarse_step;
    for (int r = 0; r < sarg_.refinements; ++r) {
      if (step % 10 != 0) throw DomainError("SargSearch: refinements exceed the lattice");
      step /= 10;
    }
    lattice_max_ = std::lround(0.5 / sarg_.unit);
    if (lattice_max_ % sarg_.coarse_step != 0) throw DomainError("SargSearch: coarse grid must end at 1/2");
  }

  WcpBound bb84(double r_mu, double q_mu, double mu, double q);
  WcpBound sarg(double r_mu, double q_mu, double mu, double q);
  WcpBound decoy(Protocol p, const PulseObservables& obs, double mu, double q);

  /// Dispatch on protocol and decoy flag for a channel.
  WcpBound evaluate(Protocol p, const ChannelParams& c, bool decoy, double q) {
    const PulseObservables obs = observables(p, c, decoy);
    if (decoy) return this->decoy(p, obs, c.mu, q);
    return p == Protocol::bb84 ? bb84(obs.r_mu, obs.q_mu, c.mu, q) : sarg(obs.r_mu, obs.q_mu, c.mu, q);
  }

  double s1_sarg_lattice(long k, double q) {
    const auto key = std::make_pair(q, k);
    auto it = sarg_s1_.find(key);
    if (it != sarg_s1_.end()) return it->second;
    const double v = s1_sarg(static_cast<double>(k) * sarg_.unit, q);
    sarg_s1_.emplace(key, v);
    return v;
  }

 private:
  double bb84_s1_min(double q1max, double q);
  double exact_s1(Protocol p, double qber, double q);

  SargSearch sarg_;
  long lattice_max_ = 0;
  std::map<std::pair<double, long>, double> sarg_s1_;
  std::map<std::pair<double, long>, double> bb84_s1_;
  std::map<std::tuple<int, double, double>, double> exact_s1_;
};

namespace detail {

inline void check_observed(double r_mu, double q_mu, double mu, double q) {
  if (!(r_mu >= 0.0 && r_mu <= 1.0)) throw DomainError("wcp: R_mu must lie in [0, 1]");
  if (!(q_mu >= 0.0 && q_mu <= 1.0)) throw DomainError("wcp: observations infeasible (R_mu Q_mu > R_mu)");
  if (!(mu > 0.0)) throw DomainError("wcp: mu must be positive");
  if (!(q >= 0.0 && q <= 0.5)) throw DomainError("wcp: q must lie in [0, 0.5]");
}

// Cost of error correction with randomization, R_mu [h(Q_mu^q) - h(q)].
inline double leak(double r_mu, double q_mu, double q) {
  return r_mu * (binary_entropy(randomized_qber(q_mu, q)) - binary_entropy(q));
}

inline WcpBound finish(WcpBound b) {
  b.abort = !(b.value > 0.0);
  return b;
}

}  // namespace detail

inline constexpr double kBb84LatticeStep = 1e-3;

inline double WcpEvaluator::bb84_s1_min(double q1max, double q) {
  // S1 is evaluated on a lattice in Q1 plus the endpoint; an interior
  // lattice winner is refined by golden-section search.
  auto lattice = [&](long k) {
    const auto key = std::make_pair(q, k);
    auto it = bb84_s1_.find(key);
    if (it != bb84_s1_.end()) return it->second;
    const double v = s1_bb84(static_cast<double>(k) * kBb84LatticeStep, q);
    bb84_s1_.emplace(key, v);
    return v;
  };
  const double at_end = s1_bb84(q1max, q);
  double best = at_end;
  long best_k = -1;
  const long kmax = static_cast<long>(std::floor(q1max / kBb84LatticeStep));
  for (long k = 0; k <= kmax; ++k) {
    const double v = lattice(k);
    if (v < best) {
      best = v;
      best_k = k;
    }
  }
  if (best_k >= 0) {
    const double lo = std::max(0.0, (best_k - 1) * kBb84LatticeStep);
    const double hi = std::min(q1max, (best_k + 1) * kBb84LatticeStep);
    if (hi > lo) {
      const auto o = opt::golden_section([&](double x) { return s1_bb84(x, q); }, {lo, hi, 1e-9, 400},
                                         opt::Goal::minimize);
      best = std::min(best, o.fx);
    }
  }
  return best;
}

inline WcpBound WcpEvaluator::bb84(double r_mu, double q_mu, double mu, double q) {
  detail::check_observed(r_mu, q_mu, mu, q);
  WcpBound b;
  const double multi = 0.5 * poisson_tail(mu, 2);
  const double r1min = r_mu - multi;
  const double p1 = poisson_pn(mu, 1);
  b.witness["q"] = q;
  b.witness["mu"] = mu;
  if (!(r1min > 0.0) || r1min > 0.5 * p1) {
    // Multi-photon pulses explain every click, or the clicks exceed what
    // single photons can produce.
    b.witness["R1"] = 0.0;
    b.witness["Q1"] = 0.0;
    b.witness["infeasible"] = r1min > 0.5 * p1 ? 1.0 : 0.0;
    b.value = std::min(0.0, -detail::leak(r_mu, q_mu, q));
    return detail::finish(b);
  }
  const double q1max = std::min(r_mu * q_mu / r1min, 0.5);
  const double s1 = q == 0.0 ? 1.0 - binary_entropy(q1max) : bb84_s1_min(q1max, q);
  b.value = r1min * (s1 - binary_entropy(q)) - detail::leak(r_mu, q_mu, q);
  b.witness["R1"] = r1min;
  b.witness["Q1"] = q1max;
  return detail::finish(b);
}

namespace detail {

struct LpVertex {
  double r1 = 0.0, r2 = 0.0, objective = std::numeric_limits<double>::infinity();
  bool feasible = false;
};

// min c1 R1 + c2 R2 over R1, R2 >= 0 with
//   R1 (1 - Q1) <= p1/4,  R2 (1 - Q2) <= p2/4,
//   R1 (1 - Q1) + R2 (1 - Q2) = K,  R1 Q1 + R2 Q2 <= E.
// The feasible set is a segment of the equality line, so the optimum is at
// one of its intersections with the remaining constraints.
inline LpVertex sarg_lp(double q1, double q2, double c1, double c2, double p1, double p2, double k, double e) {
  const double a = 1.0 - q1;
  const double b = 1.0 - q2;
  const double tol = 1e-13 * std::max({1e-300, k, e, p1, p2});
  std::array<std::pair<double, double>, 6> cand;
  int n = 0;
  cand[n++] = {0.0, k / b};
  cand[n++] = {k / a, 0.0};
  cand[n++] = {p1 / (4.0 * a), (k - p1 / 4.0) / b};
  cand[n++] = {(k - p2 / 4.0) / a, p2 / (4.0 * b)};
  const double det = q2 - q1;  // a q2 - b q1
  if (std::abs(det) > 1e-15) cand[n++] = {(k * q2 - e * b) / det, (a * e - q1 * k) / det};
  LpVertex best;
  for (int i = 0; i < n; ++i) {
    const auto [x, y] = cand[i];
    if (x < -tol || y < -tol) continue;
    if (a * x > p1 / 4.0 + tol || b * y > p2 / 4.0 + tol || q1 * x + q2 * y > e + tol) continue;
    const double xs = std::max(0.0, x), ys = std::max(0.0, y);
    const double obj = c1 * xs + c2 * ys;
    if (obj < best.objective) best = {xs, ys, obj, true};
  }
  return best;
}

}  // namespace detail

inline WcpBound WcpEvaluator::sarg(double r_mu, double q_mu, double mu, double q) {
  detail::check_observed(r_mu, q_mu, mu, q);
  WcpBound b;
  b.witness["q"] = q;
  b.witness["mu"] = mu;
  const double p1 = poisson_pn(mu, 1);
  const double p2 = poisson_pn(mu, 2);
  const double k = r_mu * (1.0 - q_mu) - 0.25 * poisson_tail(mu, 3);
  const double e = r_mu * q_mu;
  const double leak = detail::leak(r_mu, q_mu, q);
  const double hq = binary_entropy(q);
  if (!(k > 0.0)) {
    b.witness["R1"] = b.witness["R2"] = 0.0;
    b.value = std::min(0.0, -leak);
    return detail::finish(b);
  }

  std::map<long, double> c2_cache;
  auto c1 = [&](long i) { return s1_sarg_lattice(i, q) - hq; };
  auto c2 = [&](long i) {
    auto it = c2_cache.find(i);
    if (it != c2_cache.end()) return it->second;
    const double v = s2_sarg(static_cast<double>(i) * sarg_.unit, q) - hq;
    c2_cache.emplace(i, v);
    return v;
  };

  struct Best {
    detail::LpVertex v;
    long i1 = 0, i2 = 0;
  } best;
  auto scan = [&](long lo1, long hi1, long lo2, long hi2, long step) {
    for (long i1 = lo1; i1 <= hi1; i1 += step) {
      const double q1 = static_cast<double>(i1) * sarg_.unit;
      const double a = c1(i1);
      for (long i2 = lo2; i2 <= hi2; i2 += step) {
        const double q2 = static_cast<double>(i2) * sarg_.unit;
        const auto v = detail::sarg_lp(q1, q2, a, c2(i2), p1, p2, k, e);
        if (v.feasible && v.objective < best.v.objective) best = {v, i1, i2};
      }
    }
  };

  long step = sarg_.coarse_step;
  scan(0, lattice_max_, 0, lattice_max_, step);
  for (int r = 0; r < sarg_.refinements && best.v.feasible; ++r) {
    const long window = step;
    step /= 10;
    const long c1i = best.i1, c2i = best.i2;
    scan(std::max(0L, c1i - window), std::min(lattice_max_, c1i + window), std::max(0L, c2i - window),
         std::min(lattice_max_, c2i + window), step);
  }

  if (!best.v.feasible) {
    b.witness["infeasible"] = 1.0;
    b.witness["R1"] = b.witness["R2"] = 0.0;
    b.value = std::min(0.0, -leak);
    return detail::finish(b);
  }
  b.value = best.v.objective - leak;
  b.witness["R1"] = best.v.r1;
  b.witness["R2"] = best.v.r2;
  b.witness["Q1"] = static_cast<double>(best.i1) * sarg_.unit;
  b.witness["Q2"] = static_cast<double>(best.i2) * sarg_.unit;
  return detail::finish(b);
}

inline double WcpEvaluator::exact_s1(Protocol p, double qber, double q) {
  const auto key = std::make_tuple(static_cast<int>(p), qber, q);
  auto it = exact_s1_.find(key);
  if (it != exact_s1_.end()) return it->second;
  const double v = p == Protocol::bb84 ? s1_bb84(qber, q) : s1_sarg(qber, q);
  exact_s1_.emplace(key, v);
  return v;
}

inline WcpBound WcpEvaluator::decoy(Protocol p, const PulseObservables& obs, double mu, double q) {
  detail::check_observed(obs.r_mu, obs.q_mu, mu, q);
  if (p == Protocol::six_state) throw DomainError("decoy_bound: no pulse model for this protocol");
  const int last = p == Protocol::bb84 ? 1 : 2;
  if (static_cast<int>(obs.per_n.size()) <= last) throw DomainError("decoy_bound: per-photon-number data missing");
  const double hq = binary_entropy(q);
  WcpBound b;
  b.witness["q"] = q;
  b.witness["mu"] = mu;
  b.value = -detail::leak(obs.r_mu, obs.q_mu, q);
  for (int n = 1; n <= last; ++n) {
    const PhotonNumberTerm& t = obs.per_n[static_cast<std::size_t>(n)];
    const double rn = poisson_pn(mu, n) * t.yield;
    const double qn = std::min(0.5, t.error());
    const double sn = n == 1 ? exact_s1(p, qn, q) : s2_sarg(qn, q);
    b.value += rn * (sn - hq);
    b.witness["R" + std::to_string(n)] = rn;
    b.witness["Q" + std::to_string(n)] = qn;
  }
  return detail::finish(b);
}

/// One-off evaluations; prefer a shared WcpEvaluator for sweeps.
inline WcpBound bb84_wcp_bound(double r_mu, double q_mu, double mu, double q) {
  return WcpEvaluator().bb84(r_mu, q_mu, mu, q);
}

inline WcpBound sarg_wcp_bound(double r_mu, double q_mu, double mu, double q) {
  return WcpEvaluator().sarg(r_mu, q_mu, mu, q);
}

inline WcpBound decoy_bound(Protocol p, const PulseObservables& obs, double mu, double q) {
  return WcpEvaluator().decoy(p, obs, mu, q);
}

// ---------------------------------------------------------------------------
// Optimization over the mean photon number and the randomization.
// ---------------------------------------------------------------------------

inline constexpr double kMuMin = 1e-4;
inline constexpr double kMuMax = 2.0;

/// Randomization setting: a fixed value or optimized.
struct QMode {
  bool optimize = false;
  double value = 0.0;
};

struct MuOptimum {
  double mu = 0.0;
  double q = 0.0;
  WcpBound bound;
};

/// Maximizes the bound over log(mu) on [1e-4, 2] at fixed q: a 41-point
/// grid then golden-section search to 1e-4 in log(mu). Ties go to the
/// smaller mu.
inline MuOptimum optimize_mu_fixed_q(WcpEvaluator& ev, Protocol p, ChannelParams c, bool decoy, double q) {
  auto value = [&](double log_mu) {
    c.mu = std::exp(log_mu);
    return ev.evaluate(p, c, decoy, q).value;
  };
  const auto grid = opt::linspace(std::log(kMuMin), std::log(kMuMax), 41);
  std::size_t bi = 0;
  double bv = value(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double v = value(grid[i]);
    if (v > bv) {
      bv = v;
      bi = i;
    }
  }
  double x = grid[bi];
  const double lo = grid[bi == 0 ? 0 : bi - 1];
  const double hi = grid[std::min(bi + 1, grid.size() - 1)];
  const auto o = opt::golden_section(value, {lo, hi, 1e-4, 400, opt::TieBreak::toward_lower}, opt::Goal::maximize);
  if (o.fx > bv) x = o.x;
  MuOptimum r;
  r.mu = std::exp(x);
  r.q = q;
  c.mu = r.mu;
  r.bound = ev.evaluate(p, c, decoy, q);
  r.bound.witness["mu"] = r.mu;
  return r;
}

/// With q optimized the outer search runs over q (eleven grid values, then
/// golden-section to 1e-3) and mu is re-optimized for each q. q = 0 is
/// always among the candidates.
inline MuOptimum optimize_mu(WcpEvaluator& ev, Protocol p, const ChannelParams& c, bool decoy, QMode qm) {
  if (!qm.optimize) return optimize_mu_fixed_q(ev, p, c, decoy, qm.value);
  std::map<double, MuOptimum> seen;
  auto run = [&](double q) -> const MuOptimum& {
    auto it = seen.find(q);
    if (it == seen.end()) it = seen.emplace(q, optimize_mu_fixed_q(ev, p, c, decoy, q)).first;
    return it->second;
  };
  const auto grid = opt::linspace(0.0, 0.5, 11);
  std::size_t bi = 0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (run(grid[i]).bound.value > run(grid[bi]).bound.value) bi = i;
  const double lo = grid[bi == 0 ? 0 : bi - 1];
  const double hi = grid[std::min(bi + 1, grid.size() - 1)];
  opt::golden_section([&](double q) { return run(q).bound.value; }, {lo, hi, 1e-3, 200}, opt::Goal::maximize);
  const MuOptimum* best = &run(0.0);
  for (const auto& [q, m] : seen)
    if (m.bound.value > best->bound.value) best = &m;
  return *best;
}

/// Largest distance with a positive optimized bound, scanning [from, to] in
/// `step` km and then bisecting to `tolerance`. Returns `from` when the
/// bound is already non-positive there.
inline double cutoff_distance(WcpEvaluator& ev, Protocol p, ChannelParams c, bool decoy, QMode qm, double from,
                              double to, double step, double tolerance = 0.01) {
  auto positive = [&](double len) {
    c.length = len;
    return !optimize_mu(ev, p, c, decoy, qm).bound.abort;
  };
  if (!positive(from)) return from;
  double good = from;
  double bad = -1.0;
  for (double len = from + step; len <= to + 1e-9; len += step) {
    if (positive(len)) {
      good = len;
    } else {
      bad = len;
      break;
    }
  }
  if (bad < 0.0) return good;
  while (bad - good > tolerance) {
    const double mid = 0.5 * (good + bad);
    if (positive(mid)) {
      good = mid;
    } else {
      bad = mid;
    }
  }
  return good;
}

struct CurvePoint {
  double distance = 0.0;
  MuOptimum best;
};

/// Distance sweep from `from` to `to` (inclusive) in steps of `step`.
/// Points are computed in order; `from > to` yields no points.
inline std::vector<CurvePoint> rate_curve(WcpEvaluator& ev, Protocol p, ChannelParams c, bool decoy, QMode qm,
                                          double from, double to, double step) {
  if (!(step > 0.0)) throw DomainError("rate_curve: step must be positive");
  std::vector<CurvePoint> pts;
  if (from > to) return pts;
  const long n = static_cast<long>(std::floor((to - from) / step + 1e-9));
  for (long i = 0; i <= n; ++i) {
    c.length = from + static_cast<double>(i) * step;
    pts.push_back({c.length, optimize_mu(ev, p, c, decoy, qm)});
  }
  return pts;
}

}  // namespace qkdrate
