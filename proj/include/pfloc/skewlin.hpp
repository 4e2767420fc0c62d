// Copyright (c) 2026 pfloc developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "pfloc/errors.hpp"

namespace pfloc::skewlin {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Largest singular value, computed from the Gram matrix. Relative accuracy is
/// much better than the 1e-8 promised to callers.
inline double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (!m.allFinite()) throw parameter_error("spectral_norm: non-finite entries");
  Matrix gram;
  if (m.rows() <= m.cols()) {
    gram = m * m.adjoint();
  } else {
    gram = m.adjoint() * m;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().maxCoeff();
  return std::sqrt(std::max(0.0, top));
}

/// Dense complex matrix constrained to be Hermitian within a relative tolerance.
class HermitianMatrix {
 public:
  static HermitianMatrix from_dense(Matrix m, double rel_tol = 1e-12) {
    if (m.rows() != m.cols() || m.rows() == 0)
      throw structural_error("HermitianMatrix: square non-empty matrix required");
    const double scale = std::max(spectral_norm(m), 1e-300);
    const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (dev > rel_tol * scale)
      throw structural_error("HermitianMatrix: deviation from Hermiticity " +
                             std::to_string(dev) + " exceeds tolerance");
    return HermitianMatrix(std::move(m));
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& entries() const { return m_; }

 private:
  explicit HermitianMatrix(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

/// Dense complex skew-symmetric matrix. Skew-symmetry holds exactly because
/// only the upper triangle is ever written; the diagonal is pinned to zero.
/// Dimension zero is allowed (its pfaffian is 1 by convention); odd dimensions
/// are rejected outright rather than silently mapped to pfaffian 0.
class SkewMatrix {
 public:
  explicit SkewMatrix(int dim) {
    if (dim < 0 || dim % 2 != 0)
      throw structural_error("SkewMatrix: dimension must be even and non-negative, got " +
                             std::to_string(dim));
    m_ = Matrix::Zero(dim, dim);
  }

  /// Builds from the strict upper triangle of an arbitrary square matrix.
  static SkewMatrix from_upper(const Matrix& src) {
    if (src.rows() != src.cols())
      throw structural_error("SkewMatrix::from_upper: square matrix required");
    SkewMatrix out(static_cast<int>(src.rows()));
    for (int j = 0; j < out.dim(); ++j)
      for (int k = j + 1; k < out.dim(); ++k) out.set(j, k, src(j, k));
    return out;
  }

  /// Validates approximate skew-symmetry of a dense matrix, then adopts its
  /// upper triangle. Used for external inputs.
  static SkewMatrix from_dense(const Matrix& src, double rel_tol = 1e-12) {
    if (src.rows() != src.cols())
      throw structural_error("SkewMatrix::from_dense: square matrix required");
    const double scale = std::max(src.cwiseAbs().maxCoeff(), 1e-300);
    const double dev = (src + src.transpose()).cwiseAbs().maxCoeff();
    if (dev > rel_tol * scale * static_cast<double>(src.rows()))
      throw structural_error("SkewMatrix::from_dense: matrix is not skew-symmetric");
    return from_upper(src);
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& entries() const { return m_; }

  void set(int j, int k, Complex v) {
    if (j == k) throw structural_error("SkewMatrix::set: diagonal entries are fixed at zero");
    m_(j, k) = v;
    m_(k, j) = -v;
  }

  Complex operator()(int j, int k) const { return m_(j, k); }

 private:
  Matrix m_;
};

/// Eigenvalues ascending, eigenvector columns orthonormal.
struct SpectralData {
  RealVector eigenvalues;
  Matrix eigenvectors;
};

/// Canonical data of a real skew-symmetric matrix: O K O^T is block diagonal
/// with 2x2 blocks [[0, l_j], [-l_j, 0]] and l_j >= 0 ascending. det_o is the
/// exact sign of det(O).
struct SkewCanonical {
  RealMatrix O;
  RealVector lambdas;
  int det_o = 1;
};

inline SpectralData hermitian_eig(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.entries());
  if (es.info() != Eigen::Success)
    throw structural_error("hermitian_eig: eigensolver failed to converge");
  return SpectralData{es.eigenvalues(), es.eigenvectors()};
}

/// sum_j f(lambda_j) v_j v_j^*. Throws if f is non-finite at a spectral point.
inline Matrix matrix_function(const SpectralData& s, const std::function<Complex(double)>& f) {
  const auto n = s.eigenvalues.size();
  Vector diag(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex v = f(s.eigenvalues[j]);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw domain_error("matrix_function: f is not finite at eigenvalue " +
                             std::to_string(s.eigenvalues[j]),
                         s.eigenvalues[j]);
    diag[j] = v;
  }
  return s.eigenvectors * diag.asDiagonal() * s.eigenvectors.adjoint();
}

namespace detail {

/// Skew elimination step threshold: matrices whose pivots all fall below
/// 1e-13 * (largest input entry) are treated as structurally singular.
inline double pivot_threshold(const Matrix& m) {
  const double scale = m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
  return 1e-13 * scale;
}

}  // namespace detail

/// Pfaffian by skew-symmetric elimination (Parlett-Reid) with partial
/// pivoting; O(n^3), sign-exact through interchange tracking.
inline Complex pfaffian_elimination(const SkewMatrix& skew) {
  const int n = skew.dim();
  if (n == 0) return Complex(1.0, 0.0);
  Matrix a = skew.entries();
  const double thresh = detail::pivot_threshold(a);
  if (thresh == 0.0) return Complex(0.0, 0.0);

  double sign = 1.0;
  Complex result(1.0, 0.0);
  for (int k = 0; k + 1 < n; k += 2) {
    int kp = k + 1;
    double best = std::abs(a(kp, k));
    for (int i = k + 2; i < n; ++i) {
      const double cand = std::abs(a(i, k));
      if (cand > best) {
        best = cand;
        kp = i;
      }
    }
    if (best <= thresh) return Complex(0.0, 0.0);
    if (kp != k + 1) {
      a.row(k + 1).swap(a.row(kp));
      a.col(k + 1).swap(a.col(kp));
      sign = -sign;
    }
    const Complex pivot = a(k, k + 1);
    result *= pivot;
    const int m = n - (k + 2);
    if (m > 0) {
      // Schur complement update keeping the trailing block skew-symmetric:
      // A(i,j) += tau_i * A(j,k+1) - tau_j * A(i,k+1), tau_i = A(k,i)/pivot.
      Eigen::RowVectorXcd tau = a.row(k).segment(k + 2, m) / pivot;
      Eigen::RowVectorXcd col = a.col(k + 1).segment(k + 2, m).transpose();
      a.block(k + 2, k + 2, m, m).noalias() += tau.transpose() * col;
      a.block(k + 2, k + 2, m, m).noalias() -= col.transpose() * tau;
    }
  }
  return sign * result;
}

namespace detail {

inline Matrix drop_two(const Matrix& m, int r, int c) {
  const int n = static_cast<int>(m.rows());
  Matrix out(n - 2, n - 2);
  int oi = 0;
  for (int i = 0; i < n; ++i) {
    if (i == r || i == c) continue;
    int oj = 0;
    for (int j = 0; j < n; ++j) {
      if (j == r || j == c) continue;
      out(oi, oj) = m(i, j);
      ++oj;
    }
    ++oi;
  }
  return out;
}

inline Complex pfaffian_laplace_rec(const Matrix& m) {
  const int n = static_cast<int>(m.rows());
  if (n == 0) return Complex(1.0, 0.0);
  Complex acc(0.0, 0.0);
  // Expansion along the first row: pf = sum_c m(0,c) (-1)^(c+1) pf(minor).
  for (int c = 1; c < n; ++c) {
    if (m(0, c) == Complex(0.0, 0.0)) continue;
    const double sgn = (c % 2 == 1) ? 1.0 : -1.0;
    acc += sgn * m(0, c) * pfaffian_laplace_rec(drop_two(m, 0, c));
  }
  return acc;
}

}  // namespace detail

/// Exact recursive Laplace expansion; exponential cost, reference oracle only.
inline Complex pfaffian_laplace(const SkewMatrix& skew) {
  if (skew.dim() > 12)
    throw size_error("pfaffian_laplace: dimension " + std::to_string(skew.dim()) +
                     " exceeds the reference-oracle cap of 12");
  return detail::pfaffian_laplace_rec(skew.entries());
}

namespace detail {

/// Exact sign of det(O) for a well-conditioned real matrix, as the product of
/// LU pivot signs times the permutation sign.
inline int det_sign(const RealMatrix& o) {
  Eigen::PartialPivLU<RealMatrix> lu(o);
  double s = static_cast<double>(lu.permutationP().determinant());
  const auto diag = lu.matrixLU().diagonal();
  for (Eigen::Index i = 0; i < diag.size(); ++i) s *= (diag[i] < 0.0 ? -1.0 : 1.0);
  return s < 0.0 ? -1 : 1;
}

}  // namespace detail

/// Canonical form of a real skew-symmetric matrix of even dimension 2N.
///
/// Construction: diagonalize the Hermitian matrix iK; each eigenvector v of a
/// positive eigenvalue l yields an orthonormal real 2-plane (p, q) with
/// v = (p + iq)/sqrt(2), and the rows (q^T, p^T) realize the block
/// [[0, l], [-l, 0]]. The phase of v is fixed by making its largest-modulus
/// component real positive, which makes O deterministic for simple spectra.
/// Zero modes get an arbitrary real orthonormal kernel basis. For degenerate
/// positive eigenvalues O is only defined up to block rotations; downstream
/// quantities are convention-independent and O must never be compared
/// entrywise across implementations.
inline SkewCanonical skew_canonical(const RealMatrix& k_in, double rel_tol = 1e-10) {
  const int dim = static_cast<int>(k_in.rows());
  if (k_in.cols() != dim || dim == 0 || dim % 2 != 0)
    throw structural_error("skew_canonical: even-dimensional square matrix required");
  const double scale = std::max(k_in.cwiseAbs().maxCoeff(), 1e-300);
  if ((k_in + k_in.transpose()).cwiseAbs().maxCoeff() > rel_tol * scale * dim)
    throw structural_error("skew_canonical: input is not skew-symmetric");

  const int n_modes = dim / 2;
  Matrix h = Complex(0.0, 1.0) * k_in.cast<Complex>();
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success)
    throw structural_error("skew_canonical: eigensolver failed to converge");
  const RealVector evals = es.eigenvalues();
  const Matrix evecs = es.eigenvectors();

  const double ztol = 1e-12 * std::max(1.0, evals.cwiseAbs().maxCoeff());
  std::vector<int> positive;
  std::vector<int> zero;
  for (int j = 0; j < dim; ++j) {
    if (evals[j] > ztol)
      positive.push_back(j);
    else if (std::abs(evals[j]) <= ztol)
      zero.push_back(j);
  }
  const int n_zero_modes = static_cast<int>(zero.size()) / 2;
  if (static_cast<int>(zero.size()) % 2 != 0 ||
      n_zero_modes + static_cast<int>(positive.size()) != n_modes)
    throw structural_error("skew_canonical: spectrum failed the +/- pairing check");

  SkewCanonical out;
  out.O = RealMatrix::Zero(dim, dim);
  out.lambdas = RealVector::Zero(n_modes);

  int row = 0;
  // Kernel basis first (lambda = 0): Gram-Schmidt over real and imaginary
  // parts of the null eigenvectors.
  if (n_zero_modes > 0) {
    std::vector<RealVector> basis;
    for (int idx : zero) {
      for (int part = 0; part < 2 && static_cast<int>(basis.size()) < 2 * n_zero_modes;
           ++part) {
        RealVector cand = part == 0 ? evecs.col(idx).real() : RealVector(evecs.col(idx).imag());
        for (const auto& b : basis) cand -= b.dot(cand) * b;
        const double nrm = cand.norm();
        if (nrm > 1e-8) basis.push_back(cand / nrm);
      }
    }
    if (static_cast<int>(basis.size()) != 2 * n_zero_modes)
      throw structural_error("skew_canonical: failed to build a real kernel basis");
    for (const auto& b : basis) out.O.row(row++) = b.transpose();
  }

  for (std::size_t j = 0; j < positive.size(); ++j) {
    Vector v = evecs.col(positive[j]);
    int arg = 0;
    double best = -1.0;
    for (int i = 0; i < dim; ++i) {
      const double a = std::abs(v[i]);
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    v *= std::conj(v[arg]) / std::abs(v[arg]);
    const RealVector p = std::sqrt(2.0) * v.real();
    const RealVector q = std::sqrt(2.0) * v.imag();
    out.lambdas[n_zero_modes + static_cast<int>(j)] = evals[positive[j]];
    out.O.row(row++) = q.transpose();
    out.O.row(row++) = p.transpose();
  }

  out.det_o = detail::det_sign(out.O);
  return out;
}

/// Block-diagonal canonical matrix assembled from mode energies.
inline RealMatrix canonical_blocks(const RealVector& lambdas) {
  const int n = static_cast<int>(lambdas.size());
  RealMatrix out = RealMatrix::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    out(2 * j, 2 * j + 1) = lambdas[j];
    out(2 * j + 1, 2 * j) = -lambdas[j];
  }
  return out;
}

}  // namespace pfloc::skewlin
