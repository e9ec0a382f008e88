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

// Deterministic scalar search routines. Nothing here is randomized: the same
// inputs always produce bit-identical outputs.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "qkdrate/error.hpp"

namespace qkdrate::opt {

enum class Goal { minimize, maximize };
enum class TieBreak { toward_lower, toward_upper };

struct SearchSpec {
  double lo = 0.0;
  double hi = 1.0;
  double tolerance = 1e-9;
  int max_iterations = 400;
  TieBreak tie = TieBreak::toward_lower;

  void validate() const {
    if (!(tolerance > 0.0)) throw DomainError("SearchSpec: tolerance must be positive");
    if (!(lo <= hi)) throw DomainError("SearchSpec: endpoints out of order");
  }
};

struct Optimum {
  double x = 0.0;
  double fx = 0.0;
  int evaluations = 0;
};

namespace detail {

inline bool better(double a, double b, Goal g) { return g == Goal::minimize ? a < b : a > b; }

}  // namespace detail

/// Golden-section search on [lo, hi]. Exits once the bracket is no wider than
/// the tolerance and returns the best point evaluated.
template <class F>
Optimum golden_section(F&& f, const SearchSpec& spec, Goal goal = Goal::minimize) {
  spec.validate();
  constexpr double kInvPhi = 0.6180339887498949;  // (sqrt(5) - 1) / 2
  double a = spec.lo;
  double b = spec.hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int evals = 2;

  Optimum best{c, fc, 0};
  auto consider = [&](double x, double fx) {
    if (detail::better(fx, best.fx, goal) ||
        (fx == best.fx && (spec.tie == TieBreak::toward_lower ? x < best.x : x > best.x))) {
      best.x = x;
      best.fx = fx;
    }
  };
  consider(d, fd);

  int it = 0;
  while (b - a > spec.tolerance) {
    if (++it > spec.max_iterations) throw ConvergenceError("golden_section: iteration budget exhausted");
    // Bracket at the resolution of double; nothing left to refine.
    if (!(a < c && c <= d && d < b)) break;
    bool keep_lower;
    if (fc == fd) {
      keep_lower = spec.tie == TieBreak::toward_lower;
    } else {
      keep_lower = detail::better(fc, fd, goal);
    }
    if (keep_lower) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
      consider(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
      consider(d, fd);
    }
    ++evals;
  }
  const double mid = 0.5 * (a + b);
  const double fmid = f(mid);
  ++evals;
  consider(mid, fmid);
  best.evaluations = evals;
  return best;
}

/// Evaluates f on `points` (ascending), then refines between the neighbours
/// of the best grid point with golden-section search. Ties on the grid go to
/// the earliest point.
template <class F>
Optimum grid_then_golden(F&& f, const std::vector<double>& points, Goal goal, double rel_tolerance = 1e-9,
                         TieBreak tie = TieBreak::toward_lower) {
  if (points.empty()) throw DomainError("grid_then_golden: empty grid");
  std::size_t best_i = 0;
  double best_f = f(points[0]);
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double v = f(points[i]);
    if (detail::better(v, best_f, goal)) {
      best_f = v;
      best_i = i;
    }
  }
  Optimum out{points[best_i], best_f, static_cast<int>(points.size())};
  if (points.size() < 2) return out;
  const double lo = points[best_i == 0 ? 0 : best_i - 1];
  const double hi = points[best_i + 1 == points.size() ? best_i : best_i + 1];
  if (!(hi > lo)) return out;
  SearchSpec spec{lo, hi, std::max(rel_tolerance * (hi - lo), 1e-300), 2000, tie};
  const Optimum refined = golden_section(f, spec, goal);
  out.evaluations += refined.evaluations;
  if (detail::better(refined.fx, out.fx, goal)) {
    out.x = refined.x;
    out.fx = refined.fx;
  }
  return out;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i)
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

struct BisectionResult {
  double root = 0.0;   // midpoint of the final bracket
  double lo = 0.0;     // last point where the predicate held
  double hi = 0.0;     // last point where it failed
  std::vector<std::pair<double, double>> trace;  // (x, f(x)) for every evaluation
};

/// Bisection on a sign change: f(lo) > 0 and f(hi) <= 0 (or the reverse).
/// `positive` decides which side a value falls on.
template <class F, class P>
BisectionResult bisect_sign_change(F&& f, const SearchSpec& spec, P&& positive) {
  spec.validate();
  BisectionResult r;
  double a = spec.lo;
  double b = spec.hi;
  const double fa = f(a);
  const double fb = f(b);
  r.trace.emplace_back(a, fa);
  r.trace.emplace_back(b, fb);
  const bool pa = positive(fa);
  const bool pb = positive(fb);
  if (pa == pb) throw NoSignChangeError("bisect_sign_change: no sign change in bracket");
  int it = 0;
  while (b - a > spec.tolerance) {
    if (++it > spec.max_iterations) throw ConvergenceError("bisect_sign_change: iteration budget exhausted");
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    r.trace.emplace_back(m, fm);
    if (positive(fm) == pa) {
      a = m;
    } else {
      b = m;
    }
  }
  r.root = 0.5 * (a + b);
  r.lo = pa ? a : b;
  r.hi = pa ? b : a;
  return r;
}

template <class F>
BisectionResult bisect_sign_change(F&& f, const SearchSpec& spec) {
  return bisect_sign_change(std::forward<F>(f), spec, [](double v) { return v > 0.0; });
}

/// Least-squares slope of log(r) against log(t).
inline double loglog_slope(std::span<const std::pair<double, double>> points) {
  if (points.size() < 4) throw DomainError("loglog_slope: need at least 4 points");
  double sx = 0.0, sy = 0.0;
  for (const auto& [t, r] : points) {
    if (!(t > 0.0) || !(r > 0.0)) throw DomainError("loglog_slope: non-positive value");
    sx += std::log(t);
    sy += std::log(r);
  }
  const double n = static_cast<double>(points.size());
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [t, r] : points) {
    const double dx = std::log(t) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(r) - my);
  }
  if (!(sxx > 0.0)) throw DomainError("loglog_slope: abscissae are all equal");
  return sxy / sxx;
}

}  // namespace qkdrate::opt
