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

// Entropy engine for two-qubit states shared by Alice (A) and Bob (B) with an
// eavesdropper register E. Alice's bit is randomized (U <- X flipped with
// probability q) and the bound S(U|E) - H(U|Y) is evaluated exactly.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "qkdrate/bell_diagonal.hpp"
#include "qkdrate/entropy.hpp"
#include "qkdrate/error.hpp"
#include "qkdrate/linalg.hpp"
#include "qkdrate/rate_bound.hpp"

namespace qkdrate {

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kNegativeEigenTolerance = 1e-10;
inline constexpr double kTraceTolerance = 1e-10;

/// Hermitian positive semidefinite operator with an explicit weight (its
/// trace). Sub-normalized operators describe branches that survive sifting or
/// filtering with probability `weight()`.
class DensityOperator {
 public:
  DensityOperator() = default;

  explicit DensityOperator(CMatrix m) : m_(std::move(m)) {
    if (m_.dim() == 0) throw DomainError("DensityOperator: empty matrix");
    if (m_.hermiticity_defect() > kHermitianTolerance) throw DomainError("DensityOperator: not Hermitian");
    weight_ = m_.trace().real();
  }

  DensityOperator(CMatrix m, double declared_weight) : DensityOperator(std::move(m)) {
    if (std::abs(weight_ - declared_weight) > kTraceTolerance)
      throw DomainError("DensityOperator: trace differs from declared weight");
  }

  static DensityOperator maximally_mixed(std::size_t dim) {
    return DensityOperator(CMatrix::identity(dim) * Complex(1.0 / static_cast<double>(dim)));
  }

  std::size_t dim() const { return m_.dim(); }
  double weight() const { return weight_; }
  const CMatrix& matrix() const { return m_; }

  DensityOperator normalized() const {
    if (!(weight_ > 0.0)) throw ZeroWeightError("DensityOperator: zero weight");
    return DensityOperator(m_ * Complex(1.0 / weight_));
  }

  std::vector<double> eigenvalues() const { return hermitian_eigenvalues(m_); }

  // Throws if an eigenvalue is below -kNegativeEigenTolerance.
  void check_psd() const {
    for (double e : eigenvalues())
      if (e < -kNegativeEigenTolerance) throw DomainError("DensityOperator: negative eigenvalue");
  }

 private:
  CMatrix m_;
  double weight_ = 0.0;
};

namespace detail {

inline double entropy_of_spectrum(const std::vector<double>& ev) {
  double s = 0.0;
  for (double e : ev) {
    if (e < -kNegativeEigenTolerance) throw DomainError("von_neumann_entropy: negative eigenvalue");
    s -= xlog2x(e);
  }
  return s;
}

// Entropy of a matrix whose trace need not be one; used for the blocks of a
// classical-quantum operator.
inline double unnormalized_entropy(const CMatrix& m) { return entropy_of_spectrum(hermitian_eigenvalues(m)); }

}  // namespace detail

/// von Neumann entropy in bits of a trace-one operator.
inline double von_neumann_entropy(const DensityOperator& rho) {
  if (std::abs(rho.weight() - 1.0) > kTraceTolerance)
    throw DomainError("von_neumann_entropy: trace is not 1");
  return detail::entropy_of_spectrum(rho.eigenvalues());
}

/// Operator on A (x) B (x) E with A and B qubits. Basis index is
/// (a * 2 + b) * dim_e + e.
struct TripartiteOperator {
  DensityOperator rho;
  std::size_t dim_e = 4;
};

/// Pure vector on A (x) B (x) E, same index convention.
struct TripartitePure {
  std::vector<Complex> amplitudes;
  std::size_t dim_e = 4;

  double norm2() const {
    double s = 0.0;
    for (const auto& a : amplitudes) s += std::norm(a);
    return s;
  }

  TripartiteOperator to_operator() const {
    return TripartiteOperator{DensityOperator(CMatrix::outer(amplitudes)), dim_e};
  }
};

/// Bell vector |Phi_ij> on two qubits, index a * 2 + b.
inline std::vector<Complex> bell_vector(int bit, int phase) {
  std::vector<Complex> v(4);
  const double s = 1.0 / std::sqrt(2.0);
  v[static_cast<std::size_t>(0 * 2 + (bit & 1))] += s;
  v[static_cast<std::size_t>(1 * 2 + (1 - (bit & 1)))] += (phase & 1) ? -s : s;
  return v;
}

/// Purification sum_ij sqrt(lambda_ij) |Phi_ij>_AB |e_ij>_E with the
/// computational basis of a four-dimensional E.
inline TripartitePure purify_bell_diagonal(const BellDiagonal& lam) {
  TripartitePure psi{std::vector<Complex>(16), 4};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double amp = std::sqrt(std::max(0.0, lam(i, j)));
      const auto phi = bell_vector(i, j);
      const std::size_t e = static_cast<std::size_t>(2 * i + j);
      for (std::size_t ab = 0; ab < 4; ++ab) psi.amplitudes[ab * 4 + e] += amp * phi[ab];
    }
  return psi;
}

/// Reduced state on AB of a tripartite operator.
inline CMatrix trace_out_e(const TripartiteOperator& t) {
  const std::size_t de = t.dim_e;
  const CMatrix& m = t.rho.matrix();
  CMatrix ab(4);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c)
      for (std::size_t e = 0; e < de; ++e) ab(r, c) += m(r * de + e, c * de + e);
  return ab;
}

/// Applies a local operator on AB: rho -> (M (x) 1_E) rho (M (x) 1_E)^dagger.
inline TripartiteOperator apply_ab(const CMatrix& m_ab, const TripartiteOperator& t) {
  if (m_ab.dim() != 4) throw DomainError("apply_ab: operator must act on two qubits");
  const CMatrix full = kron(m_ab, CMatrix::identity(t.dim_e));
  return TripartiteOperator{DensityOperator(full * t.rho.matrix() * full.adjoint()), t.dim_e};
}

/// Classical-quantum description of (U, Y, E) after Alice's measurement and
/// randomization and Bob's measurement.
struct CqDecomposition {
  std::array<double, 2> weight_u{};            // P(U = u)
  std::array<DensityOperator, 2> cond_e;       // rho_E conditioned on U = u, trace 1
  std::array<std::array<double, 2>, 2> joint_uy{};  // P(U = u, Y = y)
  double input_weight = 1.0;                   // trace of the operator before renormalization
  double q = 0.0;

  /// Eve's unconditional state sum_u P(u) rho_E^u.
  CMatrix rho_e() const {
    CMatrix m = cond_e[0].matrix() * Complex(weight_u[0]);
    m += cond_e[1].matrix() * Complex(weight_u[1]);
    return m;
  }

  double p_u_ne_y() const { return joint_uy[0][1] + joint_uy[1][0]; }
};

inline constexpr double kZeroWeightThreshold = 1e-15;

/// Alice measures A in the computational basis (X), flips the outcome with
/// probability q (U), Bob measures B (Y). Eve keeps E. The input may be
/// sub-normalized; everything is reported conditioned on the branch.
inline CqDecomposition measure_and_randomize(const TripartiteOperator& t, double q) {
  if (!(q >= 0.0 && q <= 0.5)) throw DomainError("measure_and_randomize: q must lie in [0, 0.5]");
  const std::size_t de = t.dim_e;
  if (de == 0 || de > 8) throw DomainError("measure_and_randomize: Eve's dimension must be in 1..8");
  if (t.rho.dim() != 4 * de) throw DomainError("measure_and_randomize: operator dimension mismatch");
  const double w = t.rho.weight();
  if (!(w > kZeroWeightThreshold)) throw ZeroWeightError("measure_and_randomize: zero-weight input");

  const CMatrix& m = t.rho.matrix();
  std::array<CMatrix, 2> e_given_x{CMatrix(de), CMatrix(de)};
  std::array<std::array<double, 2>, 2> p_xy{};
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y) {
      const std::size_t base = (x * 2 + y) * de;
      for (std::size_t e = 0; e < de; ++e) {
        p_xy[x][y] += m(base + e, base + e).real() / w;
        for (std::size_t f = 0; f < de; ++f) e_given_x[x](e, f) += m(base + e, base + f) / w;
      }
    }

  CqDecomposition d;
  d.input_weight = w;
  d.q = q;
  for (std::size_t u = 0; u < 2; ++u) {
    CMatrix block = e_given_x[u] * Complex(1.0 - q) + e_given_x[1 - u] * Complex(q);
    const double pu = block.trace().real();
    d.weight_u[u] = pu;
    for (std::size_t y = 0; y < 2; ++y) d.joint_uy[u][y] = (1.0 - q) * p_xy[u][y] + q * p_xy[1 - u][y];
    if (pu > kZeroWeightThreshold) {
      d.cond_e[u] = DensityOperator(block * Complex(1.0 / pu));
    } else {
      // Never observed; any state works since it carries zero weight.
      d.weight_u[u] = 0.0;
      d.cond_e[u] = DensityOperator::maximally_mixed(de);
    }
  }
  return d;
}

inline CqDecomposition measure_and_randomize(const TripartitePure& psi, double q) {
  return measure_and_randomize(psi.to_operator(), q);
}

/// S(U|E) = S(rho_UE) - S(rho_E), with rho_UE block diagonal in U.
inline double s_u_given_e(const CqDecomposition& d) {
  double s_ue = shannon_entropy({d.weight_u[0], d.weight_u[1]});
  for (std::size_t u = 0; u < 2; ++u)
    if (d.weight_u[u] > 0.0) s_ue += d.weight_u[u] * von_neumann_entropy(d.cond_e[u]);
  return s_ue - detail::unnormalized_entropy(d.rho_e());
}

/// H(U|Y) = H(U, Y) - H(Y) from the joint table.
inline double h_u_given_y(const CqDecomposition& d) {
  const auto& j = d.joint_uy;
  return shannon_entropy({j[0][0], j[0][1], j[1][0], j[1][1]}) -
         shannon_entropy({j[0][0] + j[1][0], j[0][1] + j[1][1]});
}

/// One-way key rate per raw-key bit, S(U|E) - H(U|Y).
inline RateBound keyrate_two_qubit(const CqDecomposition& d) {
  RateBound r;
  r.value = s_u_given_e(d) - h_u_given_y(d);
  r.unit = RateUnit::per_raw_bit;
  r.witness["q"] = d.q;
  r.witness["weight"] = d.input_weight;
  return r;
}

// ---------------------------------------------------------------------------
// Closed forms for Bell-diagonal inputs purified by Eve.
//
// Given X = x, Eve's state splits into two 2x2 blocks (one per bit-flip index
// i) proportional to [[l_i0, c], [c, l_i1]] with c = +-(1-2q) sqrt(l_i0 l_i1)
// after randomization. Their eigenvalues give S(UE) in closed form. These are
// templated so the advantage-distillation threshold can run at high precision.
// ---------------------------------------------------------------------------

template <class Real>
Real bell_s_u_given_e(const BasicBellDiagonal<Real>& lam, const Real& q) {
  using std::sqrt;
  std::array<Real, 4> ev;
  const Real c = Real(1) - Real(2) * q;
  for (int i = 0; i < 2; ++i) {
    const Real& a = lam(i, 0);
    const Real& b = lam(i, 1);
    const Real s = a + b;
    Real disc = (a - b) * (a - b) + Real(4) * c * c * a * b;
    if (disc < Real(0)) disc = Real(0);
    const Real r = sqrt(disc);
    ev[2 * i] = (s + r) / Real(2);
    ev[2 * i + 1] = (s - r) / Real(2);
  }
  return Real(1) + shannon_entropy<Real>(std::span<const Real>(ev.data(), 4)) - lam.entropy();
}

template <class Real>
Real bell_h_u_given_y(const BasicBellDiagonal<Real>& lam, const Real& q) {
  const Real e = lam.qber();
  return binary_entropy<Real>((Real(1) - q) * e + q * (Real(1) - e));
}

template <class Real>
Real bell_keyrate(const BasicBellDiagonal<Real>& lam, const Real& q) {
  return bell_s_u_given_e(lam, q) - bell_h_u_given_y(lam, q);
}

/// Engine route for a Bell-diagonal state: purify, measure, evaluate.
inline CqDecomposition bell_decomposition(const BellDiagonal& lam, double q) {
  return measure_and_randomize(purify_bell_diagonal(lam), q);
}

}  // namespace qkdrate
