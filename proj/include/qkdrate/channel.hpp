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

// Expected observables for weak coherent pulses sent through a lossy,
// depolarizing channel to two threshold detectors with dark counts.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "qkdrate/error.hpp"
#include "qkdrate/protocol.hpp"

namespace qkdrate {

struct ChannelParams {
  double alpha = 0.25;     // dB/km
  double length = 0.0;     // km
  double eta_det = 0.1;
  double p_dark = 1e-5;    // per detector per pulse
  double visibility = 1.0;
  double mu = 0.1;

  double transmission() const { return std::pow(10.0, -alpha * length / 10.0); }
  double eta() const { return transmission() * eta_det; }
  double fidelity() const { return 0.5 * (1.0 + visibility); }
  double disturbance() const { return 0.5 * (1.0 - visibility); }

  void validate() const {
    if (!(alpha >= 0.0)) throw DomainError("ChannelParams: attenuation must be non-negative");
    if (!(length >= 0.0)) throw DomainError("ChannelParams: length must be non-negative");
    if (!(eta_det >= 0.0 && eta_det <= 1.0)) throw DomainError("ChannelParams: eta_det must lie in [0, 1]");
    if (!(p_dark >= 0.0 && p_dark <= 1.0)) throw DomainError("ChannelParams: p_dark must lie in [0, 1]");
    if (!(visibility >= 0.0 && visibility <= 1.0)) throw DomainError("ChannelParams: visibility must lie in [0, 1]");
    if (!(mu > 0.0)) throw DomainError("ChannelParams: mu must be positive");
  }
};

inline double poisson_pn(double mu, int n) {
  if (!(mu >= 0.0)) throw DomainError("poisson_pn: mu must be non-negative");
  if (n < 0) throw DomainError("poisson_pn: n must be non-negative");
  if (mu == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(-mu + n * std::log(mu) - std::lgamma(n + 1.0));
}

/// Sum of p_n over n >= n0. For small mu the complement 1 - partial sum
/// cancels badly, so the series is summed directly there.
inline double poisson_tail(double mu, int n0) {
  if (n0 <= 0) return 1.0;
  if (mu < 1.0) {
    double s = 0.0;
    for (int n = n0; n < n0 + 200; ++n) {
      const double t = poisson_pn(mu, n);
      s += t;
      if (t < 1e-18 * s) break;
    }
    return s;
  }
  double partial = 0.0;
  for (int n = 0; n < n0; ++n) partial += poisson_pn(mu, n);
  return std::max(0.0, 1.0 - partial);
}

struct PhotonNumberTerm {
  int n = 0;
  double yield = 0.0;        // Y_n
  double error_yield = 0.0;  // Y_n Q_n
  double error() const { return yield > 0.0 ? error_yield / yield : 0.0; }
};

struct PulseObservables {
  double r_mu = 0.0;
  double q_mu = 0.0;
  std::vector<PhotonNumberTerm> per_n;  // n = 0 .. n_max
};

inline constexpr int kMaxPhotonNumber = 25;

namespace detail {

struct ChannelConstants {
  double eta, f, d, p_dark, pbar;
};

inline ChannelConstants channel_constants(const ChannelParams& c) {
  c.validate();
  return {c.eta(), c.fidelity(), c.disturbance(), c.p_dark, 1.0 - c.p_dark};
}

// Attenuation factors written as exp(x) so that differences and complements
// go through expm1 and keep full relative precision.
struct Exponents {
  double none, right, wrong;  // log of the no-click, right-click and wrong-click survival factors
};

inline Exponents per_n_exponents(const ChannelConstants& k, int n) {
  if (n == 0) return {0.0, 0.0, 0.0};
  return {n * std::log1p(-k.eta), n * std::log1p(-k.f * k.eta), n * std::log1p(-k.d * k.eta)};
}

inline Exponents pulse_exponents(const ChannelConstants& k, double mu) {
  return {-mu * k.eta, -mu * k.f * k.eta, -mu * k.d * k.eta};
}

// 1 - pbar^2 exp(x).
inline double any_click(const ChannelConstants& k, double x) {
  return -std::expm1(x) + std::exp(x) * k.p_dark * (2.0 - k.p_dark);
}

// exp(a) - exp(b).
inline double exp_diff(double a, double b) { return std::exp(b) * std::expm1(a - b); }

struct Rates {
  double yield, error_yield;
};

inline Rates bb84_rates(const ChannelConstants& k, const Exponents& e) {
  const double click = any_click(k, e.none);
  return {0.5 * click, 0.25 * (click + k.pbar * exp_diff(e.right, e.wrong))};
}

inline Rates sarg_rates(const ChannelConstants& k, const Exponents& e) {
  const double click = any_click(k, e.none);
  const double diff = k.pbar * exp_diff(e.right, e.wrong);
  return {0.5 * (click + 0.5 * diff), 0.25 * (click + diff)};
}

inline PhotonNumberTerm make_term(int n, const Rates& r) {
  PhotonNumberTerm t;
  t.n = n;
  t.yield = r.yield;
  t.error_yield = std::clamp(r.error_yield, 0.0, r.yield);
  return t;
}

}  // namespace detail

inline PhotonNumberTerm bb84_term(const ChannelParams& c, int n) {
  const auto k = detail::channel_constants(c);
  return detail::make_term(n, detail::bb84_rates(k, detail::per_n_exponents(k, n)));
}

inline PhotonNumberTerm sarg_term(const ChannelParams& c, int n) {
  const auto k = detail::channel_constants(c);
  return detail::make_term(n, detail::sarg_rates(k, detail::per_n_exponents(k, n)));
}

inline PulseObservables bb84_observables(const ChannelParams& c, bool with_per_n = true) {
  const auto k = detail::channel_constants(c);
  const auto r = detail::bb84_rates(k, detail::pulse_exponents(k, c.mu));
  PulseObservables o;
  o.r_mu = r.yield;
  o.q_mu = o.r_mu > 0.0 ? std::clamp(r.error_yield / o.r_mu, 0.0, 1.0) : 0.0;
  if (with_per_n)
    for (int n = 0; n <= kMaxPhotonNumber; ++n) o.per_n.push_back(bb84_term(c, n));
  return o;
}

inline PulseObservables sarg_observables(const ChannelParams& c, bool with_per_n = true) {
  const auto k = detail::channel_constants(c);
  const auto r = detail::sarg_rates(k, detail::pulse_exponents(k, c.mu));
  PulseObservables o;
  o.r_mu = r.yield;
  o.q_mu = o.r_mu > 0.0 ? std::clamp(r.error_yield / o.r_mu, 0.0, 1.0) : 0.0;
  if (with_per_n)
    for (int n = 0; n <= kMaxPhotonNumber; ++n) o.per_n.push_back(sarg_term(c, n));
  return o;
}

inline PulseObservables observables(Protocol p, const ChannelParams& c, bool with_per_n = true) {
  switch (p) {
    case Protocol::bb84: return bb84_observables(c, with_per_n);
    case Protocol::sarg: return sarg_observables(c, with_per_n);
    case Protocol::six_state: break;
  }
  throw DomainError("observables: no pulse model for this protocol");
}

}  // namespace qkdrate
