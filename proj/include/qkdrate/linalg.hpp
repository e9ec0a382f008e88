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

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "qkdrate/error.hpp"

namespace qkdrate {

using Complex = std::complex<double>;

/// Dense square complex matrix, row-major. Dimensions in this library never
/// exceed 16, so no attempt is made at blocking or SIMD.
class CMatrix {
 public:
  CMatrix() = default;
  explicit CMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

  static CMatrix identity(std::size_t dim) {
    CMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  static CMatrix diagonal(const std::vector<double>& d) {
    CMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  // |v><v|
  static CMatrix outer(const std::vector<Complex>& v) {
    CMatrix m(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = v[i] * std::conj(v[j]);
    return m;
  }

  std::size_t dim() const { return dim_; }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }

  Complex trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

  CMatrix adjoint() const {
    CMatrix a(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) a(i, j) = std::conj((*this)(j, i));
    return a;
  }

  CMatrix& operator+=(const CMatrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  CMatrix& operator-=(const CMatrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  CMatrix& operator*=(Complex s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator*(CMatrix a, Complex s) { return a *= s; }
  friend CMatrix operator*(Complex s, CMatrix a) { return a *= s; }

  friend CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    a.check_same(b);
    const std::size_t n = a.dim_;
    CMatrix c(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        const Complex aik = a(i, k);
        if (aik == Complex(0.0)) continue;
        for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend std::vector<Complex> operator*(const CMatrix& a, const std::vector<Complex>& v) {
    if (v.size() != a.dim_) throw DomainError("CMatrix * vector: dimension mismatch");
    std::vector<Complex> out(a.dim_);
    for (std::size_t i = 0; i < a.dim_; ++i)
      for (std::size_t j = 0; j < a.dim_; ++j) out[i] += a(i, j) * v[j];
    return out;
  }

  // Kronecker product a (x) b.
  friend CMatrix kron(const CMatrix& a, const CMatrix& b) {
    const std::size_t n = a.dim_ * b.dim_;
    CMatrix c(n);
    for (std::size_t i = 0; i < a.dim_; ++i)
      for (std::size_t j = 0; j < a.dim_; ++j)
        for (std::size_t k = 0; k < b.dim_; ++k)
          for (std::size_t l = 0; l < b.dim_; ++l)
            c(i * b.dim_ + k, j * b.dim_ + l) = a(i, j) * b(k, l);
    return c;
  }

  double max_abs_diff(const CMatrix& o) const {
    check_same(o);
    double m = 0.0;
    for (std::size_t k = 0; k < data_.size(); ++k) m = std::max(m, std::abs(data_[k] - o.data_[k]));
    return m;
  }

  double hermiticity_defect() const {
    double m = 0.0;
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = i; j < dim_; ++j)
        m = std::max(m, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return m;
  }

 private:
  void check_same(const CMatrix& o) const {
    if (o.dim_ != dim_) throw DomainError("CMatrix: dimension mismatch");
  }

  std::size_t dim_ = 0;
  std::vector<Complex> data_;
};

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  CMatrix vectors;             // columns are eigenvectors
  int sweeps = 0;
};

struct JacobiOptions {
  double off_tolerance = 1e-13;  // Frobenius norm of the strict off-diagonal part
  int max_sweeps = 100;
  bool want_vectors = true;
};

/// Cyclic Jacobi diagonalization of a Hermitian matrix. Each rotation first
/// removes the phase of the pivot, then applies a real Givens rotation, so
/// the accumulated transform stays unitary.
inline EigenDecomposition jacobi_eigen(const CMatrix& input, const JacobiOptions& opt = {}) {
  const std::size_t n = input.dim();
  if (input.hermiticity_defect() > 1e-12) throw DomainError("jacobi_eigen: matrix is not Hermitian");

  CMatrix a = input;
  // Symmetrize and force a real diagonal before starting.
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = a(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const Complex avg = 0.5 * (a(i, j) + std::conj(a(j, i)));
      a(i, j) = avg;
      a(j, i) = std::conj(avg);
    }
  }

  EigenDecomposition out;
  if (opt.want_vectors) out.vectors = CMatrix::identity(n);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * std::norm(a(i, j));
    return std::sqrt(s);
  };

  int sweep = 0;
  while (off_norm() >= opt.off_tolerance) {
    if (sweep++ >= opt.max_sweeps) throw ConvergenceError("jacobi_eigen: too many sweeps");
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double r = std::abs(a(p, q));
        if (r == 0.0) continue;
        const Complex phase = a(p, q) / r;  // e^{i phi}
        const Complex phase_c = std::conj(phase);
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * r);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // a <- a U with U_pp = c, U_pq = s, U_qp = -s e^{-i phi}, U_qq = c e^{-i phi}.
        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = c * akp - s * phase_c * akq;
          a(k, q) = s * akp + c * phase_c * akq;
        }
        // a <- U^dagger a
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = c * apk - s * phase * aqk;
          a(q, k) = s * apk + c * phase * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();

        if (opt.want_vectors) {
          CMatrix& v = out.vectors;
          for (std::size_t k = 0; k < n; ++k) {
            const Complex vkp = v(k, p);
            const Complex vkq = v(k, q);
            v(k, p) = c * vkp - s * phase_c * vkq;
            v(k, q) = s * vkp + c * phase_c * vkq;
          }
        }
      }
    }
  }
  out.sweeps = sweep;

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a(order[i], order[i]).real();
  if (opt.want_vectors) {
    CMatrix sorted(n);
    for (std::size_t col = 0; col < n; ++col)
      for (std::size_t k = 0; k < n; ++k) sorted(k, col) = out.vectors(k, order[col]);
    out.vectors = std::move(sorted);
  }
  return out;
}

inline std::vector<double> hermitian_eigenvalues(const CMatrix& m) {
  return jacobi_eigen(m, JacobiOptions{.want_vectors = false}).values;
}

}  // namespace qkdrate
