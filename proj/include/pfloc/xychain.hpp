// Copyright (c) 2026 pfloc developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pfloc/errors.hpp"
#include "pfloc/rng.hpp"
#include "pfloc/skewlin.hpp"

namespace pfloc::xychain {

using skewlin::Complex;
using skewlin::HermitianMatrix;
using skewlin::Matrix;
using skewlin::RealVector;

/// Couplings of an open anisotropic XY chain: interaction strength mu and
/// anisotropy gamma on the N-1 bonds, transverse field nu on the N sites.
struct ChainParams {
  int N = 0;
  std::vector<double> mu;
  std::vector<double> gamma;
  std::vector<double> nu;

  void validate() const {
    if (N < 1) throw structural_error("ChainParams: N must be >= 1");
    if (static_cast<int>(mu.size()) != N - 1 || static_cast<int>(gamma.size()) != N - 1 ||
        static_cast<int>(nu.size()) != N)
      throw structural_error("ChainParams: array lengths must be N-1, N-1, N");
    auto finite = [](const std::vector<double>& v) {
      for (double x : v)
        if (!std::isfinite(x)) return false;
      return true;
    };
    if (!finite(mu) || !finite(gamma) || !finite(nu))
      throw structural_error("ChainParams: non-finite entry");
  }
};

struct FieldDistribution {
  enum class Kind { uniform, gaussian, constant };
  Kind kind = Kind::constant;
  // uniform: (a, b); gaussian: (mean, stddev); constant: (c, unused)
  double p1 = 0.0;
  double p2 = 0.0;

  static FieldDistribution uniform(double a, double b) {
    if (!(a < b)) throw parameter_error("uniform field distribution requires a < b");
    return {Kind::uniform, a, b};
  }
  static FieldDistribution gaussian(double mean, double stddev) {
    if (!(stddev > 0)) throw parameter_error("gaussian field distribution requires stddev > 0");
    return {Kind::gaussian, mean, stddev};
  }
  static FieldDistribution constant(double c) { return {Kind::constant, c, 0.0}; }
};

/// Disorder model: iid random field, constant couplings.
struct DisorderSpec {
  FieldDistribution field_distribution;
  double mu_value = 1.0;
  double gamma_value = 0.0;
  std::uint64_t seed = 0;
};

/// State selector. beta = infinity is intentionally not a legal Thermal value;
/// the GroundState kind covers it without exp overflow. An Eigenstate with an
/// empty alpha means "resample alpha per realization" in ensemble contexts.
struct StateSpec {
  enum class Kind { thermal, ground_state, eigenstate, twisted_thermal };
  Kind kind = Kind::ground_state;
  double beta = 0.0;
  std::vector<int> alpha;

  static StateSpec thermal(double beta) {
    if (!(beta > 0) || !std::isfinite(beta))
      throw parameter_error("thermal state requires finite beta > 0");
    StateSpec s;
    s.kind = Kind::thermal;
    s.beta = beta;
    return s;
  }
  static StateSpec ground_state() { return StateSpec{}; }
  static StateSpec eigenstate(std::vector<int> alpha) {
    StateSpec s;
    s.kind = Kind::eigenstate;
    s.alpha = std::move(alpha);
    for (int b : s.alpha)
      if (b != 0 && b != 1) throw parameter_error("eigenstate occupation bits must be 0/1");
    return s;
  }
  static StateSpec twisted_thermal(double beta) {
    StateSpec s = thermal(beta);
    s.kind = Kind::twisted_thermal;
    return s;
  }
};

/// Index of the Majorana basis vector for (site, flavor). Sites are 1-based;
/// the basis is site-major with flavor order (+, -) within each site. Every
/// matrix in the repository uses this ordering.
inline int basis_index(int site, bool minus_flavor) { return 2 * (site - 1) + (minus_flavor ? 1 : 0); }

/// Single-particle Hamiltonian of the chain in the Majorana basis: a 2N x 2N
/// Hermitian matrix with purely imaginary entries (H = iK with K real skew).
/// Diagonal 2x2 blocks are nu_x * sigma^2; bond blocks are -mu * (sigma^2 +
/// i gamma sigma^1) and its adjoint.
inline HermitianMatrix build_h(const ChainParams& p) {
  p.validate();
  const Complex I(0.0, 1.0);
  Matrix h = Matrix::Zero(2 * p.N, 2 * p.N);
  for (int x = 1; x <= p.N; ++x) {
    const int i = basis_index(x, false);
    h(i, i + 1) = -I * p.nu[x - 1];
    h(i + 1, i) = I * p.nu[x - 1];
  }
  for (int x = 1; x < p.N; ++x) {
    const int i = basis_index(x, false);
    const int j = basis_index(x + 1, false);
    const double mu = p.mu[x - 1];
    const double g = p.gamma[x - 1];
    // -mu * S(gamma) with S(gamma) = [[0, i(gamma-1)], [i(1+gamma), 0]].
    h(i, j + 1) = I * mu * (1.0 - g);
    h(i + 1, j) = -I * mu * (1.0 + g);
    h(j + 1, i) = std::conj(h(i, j + 1));
    h(j, i + 1) = std::conj(h(i + 1, j));
  }
  // Entries are purely imaginary by construction; keep the check cheap.
  if (h.real().cwiseAbs().maxCoeff() != 0.0)
    throw structural_error("build_h: expected purely imaginary entries");
  return HermitianMatrix::from_dense(std::move(h));
}

/// Unitarily equivalent block form [[-A, -B], [B, A]] with tridiagonal A
/// (diagonal -nu, off-diagonal mu) and skew B (off-diagonal +/- gamma*mu).
/// Spectrum agrees with build_h as a multiset.
inline HermitianMatrix build_block_form(const ChainParams& p) {
  p.validate();
  const int n = p.N;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) a(i, i) = -p.nu[i];
  for (int i = 0; i + 1 < n; ++i) {
    a(i, i + 1) = p.mu[i];
    a(i + 1, i) = p.mu[i];
    b(i, i + 1) = p.gamma[i] * p.mu[i];
    b(i + 1, i) = -p.gamma[i] * p.mu[i];
  }
  Eigen::MatrixXd m(2 * n, 2 * n);
  m << -a, -b, b, a;
  return HermitianMatrix::from_dense(m.cast<Complex>());
}

/// Draws one disorder realization. The field at each site comes from a private
/// substream keyed by (seed, realization_index, site), so realizations can be
/// evaluated in parallel and in any order without changing the numbers.
inline ChainParams sample_disorder(const DisorderSpec& spec, int n, std::uint64_t realization_index) {
  if (n < 1) throw structural_error("sample_disorder: N must be >= 1");
  constexpr std::uint64_t kFieldTag = 0x6669656c64ULL;  // "field"
  ChainParams p;
  p.N = n;
  p.mu.assign(static_cast<std::size_t>(n - 1), spec.mu_value);
  p.gamma.assign(static_cast<std::size_t>(n - 1), spec.gamma_value);
  p.nu.resize(static_cast<std::size_t>(n));
  for (int site = 1; site <= n; ++site) {
    rng::Stream s(spec.seed, realization_index, kFieldTag, static_cast<std::uint64_t>(site));
    switch (spec.field_distribution.kind) {
      case FieldDistribution::Kind::uniform:
        p.nu[site - 1] = s.uniform(spec.field_distribution.p1, spec.field_distribution.p2);
        break;
      case FieldDistribution::Kind::gaussian:
        p.nu[site - 1] = s.gaussian(spec.field_distribution.p1, spec.field_distribution.p2);
        break;
      case FieldDistribution::Kind::constant:
        p.nu[site - 1] = spec.field_distribution.p1;
        break;
    }
  }
  return p;
}

namespace detail {

/// Gate constants for the eigenstate / twisted-state hypotheses.
inline constexpr double kSpectralGate = 1e-9;

inline void require_trivial_kernel(const RealVector& lambdas, const char* who) {
  for (Eigen::Index j = 0; j < lambdas.size(); ++j)
    if (!(lambdas[j] > kSpectralGate))
      throw precondition_error(std::string(who) + ": mode energy " +
                               std::to_string(lambdas[j]) + " is within " +
                               std::to_string(kSpectralGate) + " of the kernel");
}

inline void require_simple(const RealVector& lambdas, const char* who) {
  require_trivial_kernel(lambdas, who);
  for (Eigen::Index j = 0; j + 1 < lambdas.size(); ++j) {
    const double gap = lambdas[j + 1] - lambdas[j];
    if (!(gap > kSpectralGate))
      throw precondition_error(std::string(who) + ": spectral gap " + std::to_string(gap) +
                               " between modes " + std::to_string(j) + " and " +
                               std::to_string(j + 1) + " is below " +
                               std::to_string(kSpectralGate));
  }
}

}  // namespace detail

/// Scalar function f with Gamma(t,s) = exp(-2i(t-s)H) f(H) generating all
/// static two-point values of the selected state. lambdas are the
/// non-negative mode energies, ascending; eigenstate occupations alpha[j]
/// refer to that order.
///
/// Thermal:          f(l) = 2 / (1 + exp(-2 beta l))
/// Eigenstate alpha: f(+l_j) = 2(1 - alpha_j), f(-l_j) = 2 alpha_j
/// Ground state:     eigenstate with all alpha_j = 0, realized as a sign map
/// Twisted thermal:  f(l) = 2 / (1 - exp(-2 beta l))
///
/// All four satisfy f(l) + f(-l) = 2 away from the kernel.
inline std::function<double(double)> state_function(const StateSpec& s, const RealVector& lambdas) {
  switch (s.kind) {
    case StateSpec::Kind::thermal: {
      if (!(s.beta > 0) || !std::isfinite(s.beta))
        throw parameter_error("state_function: thermal state requires finite beta > 0");
      const double beta = s.beta;
      return [beta](double l) { return 2.0 / (1.0 + std::exp(-2.0 * beta * l)); };
    }
    case StateSpec::Kind::ground_state: {
      return [](double l) {
        if (l > 0) return 2.0;
        if (l < 0) return 0.0;
        return 1.0;
      };
    }
    case StateSpec::Kind::eigenstate: {
      if (static_cast<Eigen::Index>(s.alpha.size()) != lambdas.size())
        throw structural_error("state_function: alpha length must equal the mode count");
      detail::require_simple(lambdas, "state_function(eigenstate)");
      std::vector<double> ls(lambdas.data(), lambdas.data() + lambdas.size());
      std::vector<int> alpha = s.alpha;
      return [ls, alpha](double l) {
        const double a = std::abs(l);
        std::size_t best = 0;
        double dist = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < ls.size(); ++j) {
          const double d = std::abs(a - ls[j]);
          if (d < dist) {
            dist = d;
            best = j;
          }
        }
        return l > 0 ? 2.0 * (1 - alpha[best]) : 2.0 * alpha[best];
      };
    }
    case StateSpec::Kind::twisted_thermal: {
      if (!(s.beta > 0) || !std::isfinite(s.beta))
        throw parameter_error("state_function: twisted thermal state requires finite beta > 0");
      detail::require_trivial_kernel(lambdas, "state_function(twisted_thermal)");
      const double beta = s.beta;
      return [beta](double l) { return 2.0 / (1.0 - std::exp(-2.0 * beta * l)); };
    }
  }
  throw parameter_error("state_function: unknown state kind");
}

/// The parity-twisted companion of a state: thermal states twist into the
/// twisted-thermal function, eigenstates (and the ground state) are their own
/// twist because the parity operator acts on them as a scalar, and twisting a
/// twisted-thermal state lands back on the plain thermal function.
inline std::function<double(double)> twisted_state_function(const StateSpec& s,
                                                            const RealVector& lambdas) {
  switch (s.kind) {
    case StateSpec::Kind::thermal:
      return state_function(StateSpec::twisted_thermal(s.beta), lambdas);
    case StateSpec::Kind::twisted_thermal:
      return state_function(StateSpec::thermal(s.beta), lambdas);
    default:
      return state_function(s, lambdas);
  }
}

}  // namespace pfloc::xychain
