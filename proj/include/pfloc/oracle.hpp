// Copyright (c) 2026 pfloc developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "pfloc/errors.hpp"
#include "pfloc/quasifree.hpp"
#include "pfloc/skewlin.hpp"
#include "pfloc/xychain.hpp"

// Brute-force exact diagonalization in the full 2^N spin Hilbert space. This
// is a test instrument: every correlator, sign convention, and Wick identity
// in the fast pfaffian path is validated against it. Memory is about
// 16 * 4^N bytes per operator; hard caps keep that in check.

namespace pfloc::oracle {

using skewlin::Complex;
using skewlin::Matrix;
using xychain::ChainParams;
using xychain::StateSpec;

inline constexpr int kMaxSitesStatic = 12;
inline constexpr int kMaxSitesDynamic = 10;

inline void check_sites(int n, int cap, const char* who) {
  if (n < 1 || n > cap)
    throw size_error(std::string(who) + ": N = " + std::to_string(n) +
                     " outside the supported range [1, " + std::to_string(cap) + "]");
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Pauli matrix; w = 0 gives the identity.
inline Matrix pauli(int w) {
  Matrix m(2, 2);
  const Complex I(0, 1);
  switch (w) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -I, I, 0; break;
    case 3: m << 1, 0, 0, -1; break;
    default: throw parameter_error("pauli: index must be in {0,1,2,3}");
  }
  return m;
}

/// sigma^w acting on site xi (1-based) of an N-site chain; site 1 is the
/// leftmost tensor factor.
inline Matrix site_operator(int n, int xi, int w) {
  check_sites(n, kMaxSitesStatic, "site_operator");
  if (xi < 1 || xi > n) throw parameter_error("site_operator: site out of range");
  Matrix out = Matrix::Identity(1, 1);
  for (int s = 1; s <= n; ++s) out = kron(out, s == xi ? pauli(w) : pauli(0));
  return out;
}

/// Jordan-Wigner Majorana operator: a+_xi = s3_1 ... s3_(xi-1) s1_xi and
/// a-_xi = -s3_1 ... s3_(xi-1) s2_xi.
inline Matrix jw_majorana(int xi, quasifree::Flavor flavor, int n) {
  check_sites(n, kMaxSitesStatic, "jw_majorana");
  if (xi < 1 || xi > n) throw parameter_error("jw_majorana: site out of range");
  Matrix out = Matrix::Identity(1, 1);
  for (int s = 1; s <= n; ++s) {
    if (s < xi)
      out = kron(out, pauli(3));
    else if (s == xi)
      out = kron(out, pauli(flavor == quasifree::Flavor::plus ? 1 : 2));
    else
      out = kron(out, pauli(0));
  }
  if (flavor == quasifree::Flavor::minus) out = -out;
  return out;
}

/// The spin Hamiltonian
///   S = - sum_x mu_x [(1+g_x) s1_x s1_(x+1) + (1-g_x) s2_x s2_(x+1)]
///       - sum_x nu_x s3_x.
inline Matrix build_spin_hamiltonian(const ChainParams& p) {
  p.validate();
  check_sites(p.N, kMaxSitesStatic, "build_spin_hamiltonian");
  const Eigen::Index d = Eigen::Index(1) << p.N;
  Matrix s = Matrix::Zero(d, d);
  for (int x = 1; x < p.N; ++x) {
    const double mu = p.mu[x - 1];
    const double g = p.gamma[x - 1];
    s -= mu * (1.0 + g) * (site_operator(p.N, x, 1) * site_operator(p.N, x + 1, 1));
    s -= mu * (1.0 - g) * (site_operator(p.N, x, 2) * site_operator(p.N, x + 1, 2));
  }
  for (int x = 1; x <= p.N; ++x) s -= p.nu[x - 1] * site_operator(p.N, x, 3);
  return s;
}

/// Total fermion parity det(O) s3_N ... s3_1, with det(O) taken from the
/// canonical form of the single-particle Hamiltonian.
inline Matrix parity_operator(const ChainParams& p, int det_o) {
  check_sites(p.N, kMaxSitesStatic, "parity_operator");
  const Eigen::Index d = Eigen::Index(1) << p.N;
  Matrix out = Matrix::Identity(d, d);
  for (int x = 1; x <= p.N; ++x) out = out * site_operator(p.N, x, 3);
  return static_cast<double>(det_o) * out;
}

/// Exact solver for one (chain, state) pair. Diagonalizes the spin
/// Hamiltonian once; time evolution reuses the spectral decomposition.
class Solver {
 public:
  Solver(const ChainParams& params, const StateSpec& state) : params_(params), state_(state) {
    params.validate();
    check_sites(params.N, kMaxSitesStatic, "oracle::Solver");
    const Matrix s = build_spin_hamiltonian(params);
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    if (es.info() != Eigen::Success)
      throw structural_error("oracle::Solver: eigensolver failed to converge");
    energies_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
    build_density();
  }

  const ChainParams& params() const { return params_; }
  const Eigen::VectorXd& energies() const { return energies_; }
  const Matrix& density() const { return rho_; }

  Complex expectation(const Matrix& obs) const { return (rho_ * obs).trace(); }

  /// e^{itS} A e^{-itS} through the spectral decomposition.
  Matrix evolve(const Matrix& a, double t) const {
    const Eigen::Index d = energies_.size();
    Eigen::VectorXcd phase(d);
    for (Eigen::Index j = 0; j < d; ++j) phase[j] = std::exp(Complex(0.0, t * energies_[j]));
    const Matrix u = vectors_ * phase.asDiagonal() * vectors_.adjoint();
    return u * a * u.adjoint();
  }

  /// Truncated spin correlator by direct operator algebra, with no free-fermion
  /// input whatsoever.
  Complex spin_correlation(int xi, int eta, double t, int w, int wp) const {
    if (t != 0.0) check_sites(params_.N, kMaxSitesDynamic, "spin_correlation(dynamic)");
    const Matrix a = site_operator(params_.N, xi, w);
    const Matrix b = site_operator(params_.N, eta, wp);
    const Matrix at = t == 0.0 ? a : evolve(a, t);
    return expectation(at * b) - expectation(a) * expectation(b);
  }

  /// Exact two-point Majorana expectation <a(t) b(s)>.
  Complex majorana_two_point(const quasifree::MajoranaEvent& a,
                             const quasifree::MajoranaEvent& b) const {
    return expectation(majorana(a) * majorana(b));
  }

  Matrix majorana(const quasifree::MajoranaEvent& e) const {
    Matrix op = jw_majorana(e.site, e.flavor, params_.N);
    if (e.time != 0.0) {
      check_sites(params_.N, kMaxSitesDynamic, "majorana(dynamic)");
      op = evolve(op, e.time);
    }
    return op;
  }

  Complex string_expectation(std::span<const quasifree::MajoranaEvent> events) const {
    const Eigen::Index d = energies_.size();
    Matrix prod = Matrix::Identity(d, d);
    for (const auto& e : events) prod = prod * majorana(e);
    return expectation(prod);
  }

 private:
  void build_density() {
    const Eigen::Index d = energies_.size();
    switch (state_.kind) {
      case StateSpec::Kind::thermal: {
        const double e0 = energies_.minCoeff();
        Eigen::VectorXd weights(d);
        for (Eigen::Index j = 0; j < d; ++j)
          weights[j] = std::exp(-state_.beta * (energies_[j] - e0));
        weights /= weights.sum();
        rho_ = vectors_ * weights.cast<Complex>().asDiagonal() * vectors_.adjoint();
        break;
      }
      case StateSpec::Kind::ground_state:
      case StateSpec::Kind::eigenstate: {
        std::vector<int> alpha = state_.alpha;
        if (state_.kind == StateSpec::Kind::ground_state)
          alpha.assign(static_cast<std::size_t>(params_.N), 0);
        rho_ = eigenstate_projector(alpha);
        break;
      }
      case StateSpec::Kind::twisted_thermal:
        throw precondition_error(
            "oracle::Solver: the twisted-thermal functional is not a density matrix");
    }
  }

  /// Matches the many-body level 2 sum_(alpha_j=1) l_j - sum_j l_j against the
  /// full spectrum; requires an unambiguous match.
  Matrix eigenstate_projector(const std::vector<int>& alpha) const {
    if (static_cast<int>(alpha.size()) != params_.N)
      throw structural_error("oracle eigenstate: alpha length must equal N");
    const auto h = xychain::build_h(params_);
    const auto sp = skewlin::hermitian_eig(h);
    const Eigen::VectorXd lambdas = sp.eigenvalues.tail(params_.N);
    double target = -lambdas.sum();
    for (int j = 0; j < params_.N; ++j)
      if (alpha[j]) target += 2.0 * lambdas[j];

    const Eigen::Index d = energies_.size();
    Eigen::Index best = 0;
    double dist = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < d; ++j) {
      const double dj = std::abs(energies_[j] - target);
      if (dj < dist) {
        dist = dj;
        best = j;
      }
    }
    if (dist > 1e-8)
      throw precondition_error("oracle eigenstate: no many-body level within 1e-8 of " +
                               std::to_string(target));
    for (Eigen::Index j = 0; j < d; ++j) {
      if (j == best) continue;
      const double away = std::abs(energies_[j] - target);
      if (away > 1e-8 && away < 1e-6)
        throw precondition_error(
            "oracle eigenstate: a distinct level sits within 1e-6 of the match; the "
            "identification is ambiguous");
      if (away <= 1e-8)
        throw precondition_error("oracle eigenstate: degenerate many-body level at " +
                                 std::to_string(target));
    }
    const Eigen::VectorXcd v = vectors_.col(best);
    return v * v.adjoint();
  }

  ChainParams params_;
  StateSpec state_;
  Eigen::VectorXd energies_;
  Matrix vectors_;
  Matrix rho_;
};

inline Complex exact_expectation(const ChainParams& p, const StateSpec& s, const Matrix& obs) {
  return Solver(p, s).expectation(obs);
}

inline Complex exact_spin_correlation(const ChainParams& p, const StateSpec& s, int xi, int eta,
                                      double t, int w, int wp) {
  return Solver(p, s).spin_correlation(xi, eta, t, w, wp);
}

}  // namespace pfloc::oracle
