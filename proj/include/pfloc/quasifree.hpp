// Copyright (c) 2026 pfloc developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pfloc/errors.hpp"
#include "pfloc/skewlin.hpp"
#include "pfloc/xychain.hpp"

namespace pfloc::quasifree {

using skewlin::Complex;
using skewlin::Matrix;
using skewlin::RealVector;
using skewlin::SkewMatrix;
using xychain::ChainParams;
using xychain::StateSpec;

enum class Flavor { plus, minus };

inline Flavor opposite(Flavor f) { return f == Flavor::plus ? Flavor::minus : Flavor::plus; }

/// One Majorana operator insertion: site, flavor, and the time at which it is
/// evaluated under the free dynamics.
struct MajoranaEvent {
  int site = 1;
  Flavor flavor = Flavor::plus;
  double time = 0.0;
};

inline int event_index(const MajoranaEvent& e) {
  return xychain::basis_index(e.site, e.flavor == Flavor::minus);
}

/// Ordered list of Majorana insertions, the index set of a Wick pfaffian.
/// Repeated (site, flavor, time) triples are legal in correlator strings
/// (an operator squared is the identity and the two-point kernel encodes
/// that); distinctness only matters for the decay-bound machinery, which
/// checks it separately.
struct MajoranaConfig {
  std::vector<MajoranaEvent> events;

  bool even() const { return events.size() % 2 == 0; }

  bool has_distinct_events() const {
    for (std::size_t i = 0; i < events.size(); ++i)
      for (std::size_t j = i + 1; j < events.size(); ++j)
        if (events[i].site == events[j].site && events[i].flavor == events[j].flavor &&
            events[i].time == events[j].time)
          return false;
    return true;
  }
};

inline Complex ipow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return Complex(1, 0);
    case 1: return Complex(0, 1);
    case 2: return Complex(-1, 0);
    default: return Complex(0, -1);
  }
}

/// Parity trace tr(P_N rho) of a state whose density matrix commutes with the
/// chain Hamiltonian. Eigenstates carry parity (-1)^(sum alpha_j + N); thermal
/// states give prod_j(-tanh(beta l_j)). Twisted-thermal functionals are not
/// states and are rejected.
inline double parity_trace(const StateSpec& s, const RealVector& lambdas) {
  const int n = static_cast<int>(lambdas.size());
  switch (s.kind) {
    case StateSpec::Kind::ground_state:
      return (n % 2 == 0) ? 1.0 : -1.0;
    case StateSpec::Kind::eigenstate: {
      if (static_cast<int>(s.alpha.size()) != n)
        throw structural_error("parity_trace: alpha length must equal the mode count");
      int total = n;
      for (int b : s.alpha) total += b;
      return (total % 2 == 0) ? 1.0 : -1.0;
    }
    case StateSpec::Kind::thermal: {
      double p = 1.0;
      for (int j = 0; j < n; ++j) p *= -std::tanh(s.beta * lambdas[j]);
      return p;
    }
    case StateSpec::Kind::twisted_thermal:
      throw precondition_error("parity_trace: the twisted-thermal functional is not a state");
  }
  throw parameter_error("parity_trace: unknown state kind");
}

/// All spectral machinery of one chain + state pair. Immutable after
/// construction; every evaluation is a pure function of the kernel, so values
/// may be shared freely across threads.
class Kernel {
 public:
  static Kernel make(const ChainParams& params, const StateSpec& state) {
    if (state.kind == StateSpec::Kind::twisted_thermal)
      throw precondition_error(
          "Kernel::make: construct from the underlying thermal state; twisted values are "
          "reached through the parity-twisted evaluation paths");
    Kernel k;
    k.params_ = params;
    k.state_ = state;
    const auto h = xychain::build_h(params);
    k.spectral_ = skewlin::hermitian_eig(h);
    k.n_ = params.N;
    k.lambdas_ = k.spectral_.eigenvalues.tail(params.N);
    if (state.kind == StateSpec::Kind::eigenstate &&
        static_cast<int>(state.alpha.size()) != params.N)
      throw structural_error("Kernel::make: alpha length must equal N");
    k.f_ = xychain::state_function(state, k.lambdas_);
    k.canonical_ = skewlin::skew_canonical(h.entries().imag());
    k.parity_trace_ = parity_trace(state, k.lambdas_);
    k.norm_bound_ = 1.0;
    k.gamma0_ = matrix_from(k.f_, 0.0, k.spectral_);
    return k;
  }

  int sites() const { return n_; }
  const ChainParams& params() const { return params_; }
  const StateSpec& state() const { return state_; }
  const skewlin::SpectralData& spectral() const { return spectral_; }
  const RealVector& lambdas() const { return lambdas_; }
  int det_o() const { return canonical_.det_o; }
  const skewlin::SkewCanonical& canonical() const { return canonical_; }
  double parity() const { return parity_trace_; }
  /// Functional bound M0; 1 for the normalized states handled here.
  double norm_bound() const { return norm_bound_; }
  /// Functional bound of the parity-twisted companion functional.
  double twisted_norm_bound() const {
    require_parity();
    return 1.0 / std::abs(parity_trace_);
  }

  /// Two-point matrix Gamma(tdiff) = exp(-2i tdiff H) f(H) in the fixed
  /// (site, flavor) basis; entry (j, k) is the expectation of a_j(t) a_k(s)
  /// with t - s = tdiff. The twisted companion function is built on demand so
  /// that its trivial-kernel gate fires only when the twisted route is used.
  Matrix gamma(double tdiff, bool twisted = false) const {
    if (!twisted && tdiff == 0.0) return gamma0_;
    if (twisted) return matrix_from(xychain::twisted_state_function(state_, lambdas_), tdiff, spectral_);
    return matrix_from(f_, tdiff, spectral_);
  }

  void require_parity() const {
    if (!(std::abs(parity_trace_) > 1e-12))
      throw precondition_error("parity trace " + std::to_string(parity_trace_) +
                               " vanishes; the twisted route is unavailable");
  }

 private:
  static Matrix matrix_from(const std::function<double(double)>& f, double tdiff,
                            const skewlin::SpectralData& s) {
    return skewlin::matrix_function(s, [&](double l) {
      const Complex phase = std::exp(Complex(0.0, -2.0 * tdiff * l));
      return phase * f(l);
    });
  }

  ChainParams params_;
  StateSpec state_;
  skewlin::SpectralData spectral_;
  skewlin::SkewCanonical canonical_;
  RealVector lambdas_;
  std::function<double(double)> f_;
  Matrix gamma0_;
  double parity_trace_ = 1.0;
  double norm_bound_ = 1.0;
  int n_ = 0;
};

inline Complex two_point(const Kernel& k, const MajoranaEvent& a, const MajoranaEvent& b,
                         bool twisted = false) {
  if (a.site < 1 || a.site > k.sites() || b.site < 1 || b.site > k.sites())
    throw parameter_error("two_point: site out of range");
  return k.gamma(a.time - b.time, twisted)(event_index(a), event_index(b));
}

/// Wick pfaffian of an arbitrary event string. The skew matrix is defined by
/// its upper triangle only: entry (j, k) for j < k is the two-point value of
/// events j and k in that order; at unequal times the reversed product is not
/// a mere sign flip, so the lower triangle is always filled by skew-symmetry,
/// never by evaluating reversed pairs. Odd-length strings return exact zero.
inline Complex wick_pfaffian(const Kernel& k, std::span<const MajoranaEvent> events,
                             bool twisted = false) {
  const int n = static_cast<int>(events.size());
  if (n % 2 != 0) return Complex(0.0, 0.0);
  if (n == 0) return Complex(1.0, 0.0);
  std::map<double, Matrix> gammas;
  for (int j = 0; j < n; ++j)
    for (int kk = j + 1; kk < n; ++kk) {
      const double d = events[j].time - events[kk].time;
      if (!gammas.count(d)) gammas.emplace(d, k.gamma(d, twisted));
    }
  SkewMatrix m(n);
  for (int j = 0; j < n; ++j)
    for (int kk = j + 1; kk < n; ++kk) {
      const auto& g = gammas.at(events[j].time - events[kk].time);
      m.set(j, kk, g(event_index(events[j]), event_index(events[kk])));
    }
  return skewlin::pfaffian_elimination(m);
}

inline Complex wick_pfaffian(const Kernel& k, const MajoranaConfig& c, bool twisted = false) {
  return wick_pfaffian(k, std::span<const MajoranaEvent>(c.events), twisted);
}

namespace detail {

inline double real_checked(Complex v, const char* who, double imag_tol = 1e-9) {
  if (std::abs(v.imag()) > imag_tol)
    throw structural_error(std::string(who) + ": imaginary residue " +
                           std::to_string(v.imag()) + " exceeds " + std::to_string(imag_tol));
  return v.real();
}

inline Flavor flavor_of(int w) {
  if (w == 1) return Flavor::plus;
  if (w == 2) return Flavor::minus;
  throw parameter_error("pauli index for a Majorana flavor must be 1 or 2, got " +
                        std::to_string(w));
}

inline void check_site(const Kernel& k, int xi, const char* who) {
  if (xi < 1 || xi > k.sites())
    throw parameter_error(std::string(who) + ": site " + std::to_string(xi) + " out of range");
}

}  // namespace detail

/// Two-point data for correlators evaluated at time separation t against time
/// 0: g0 carries equal-time values, gt carries (t, 0) values. Building one
/// slice per (realization, t) and reusing it across site pairs is the hot
/// path of the ensemble runner.
struct CorrelationSlice {
  const Kernel* kernel = nullptr;
  double t = 0.0;
  Matrix g0;
  Matrix gt;

  static CorrelationSlice make(const Kernel& k, double t) {
    CorrelationSlice s;
    s.kernel = &k;
    s.t = t;
    s.g0 = k.gamma(0.0);
    s.gt = k.gamma(t);
    return s;
  }
};

/// <sigma^3_xi> = i <a+_xi a-_xi>. Exactly time-invariant under the free
/// dynamics, real after discarding a checked imaginary residue.
inline double sigma3_expectation(const Kernel& k, int xi) {
  detail::check_site(k, xi, "sigma3_expectation");
  const int i = xychain::basis_index(xi, false);
  const Complex v = Complex(0, 1) * k.gamma(0.0)(i, i + 1);
  return detail::real_checked(v, "sigma3_expectation");
}

/// Truncated correlation <tau_t(sigma^3_xi) sigma^3_eta> - <sigma^3_xi><sigma^3_eta>,
/// a 2x2 Wick determinant of two-point values.
inline Complex sigma3_correlation(const CorrelationSlice& s, int xi, int eta) {
  detail::check_site(*s.kernel, xi, "sigma3_correlation");
  detail::check_site(*s.kernel, eta, "sigma3_correlation");
  const int ip = xychain::basis_index(xi, false);
  const int im = ip + 1;
  const int jp = xychain::basis_index(eta, false);
  const int jm = jp + 1;
  return s.gt(ip, jp) * s.gt(im, jm) - s.gt(ip, jm) * s.gt(im, jp);
}

inline Complex sigma3_correlation(const Kernel& k, int xi, int eta, double t) {
  return sigma3_correlation(CorrelationSlice::make(k, t), xi, eta);
}

/// <tau_t(sigma^3_xi) sigma^w_eta> for w in {1,2} vanishes identically (the
/// underlying Majorana string has odd length). Exposed so callers can treat
/// all nine (w, w') pairs uniformly.
inline Complex sigma3_cross_correlation(const Kernel& k, int xi, int eta, double t, int w) {
  detail::check_site(k, xi, "sigma3_cross_correlation");
  detail::check_site(k, eta, "sigma3_cross_correlation");
  detail::flavor_of(w);
  (void)t;
  return Complex(0.0, 0.0);
}

/// Single-site <sigma^w_xi> for w in {1,2}: exact zero, the Jordan-Wigner
/// string holds an odd number of Majorana operators.
inline Complex sigma12_expectation(const Kernel& k, int xi, int w) {
  detail::check_site(k, xi, "sigma12_expectation");
  detail::flavor_of(w);
  return Complex(0.0, 0.0);
}

namespace detail {

inline std::vector<MajoranaEvent> direct_events(int xi, int eta, double t, int w, int wp) {
  std::vector<MajoranaEvent> ev;
  ev.reserve(2 * (xi + eta - 1));
  for (int l = 1; l < xi; ++l) {
    ev.push_back({l, Flavor::plus, t});
    ev.push_back({l, Flavor::minus, t});
  }
  ev.push_back({xi, flavor_of(w), t});
  ev.push_back({eta, flavor_of(wp), 0.0});
  for (int m = 1; m < eta; ++m) {
    ev.push_back({m, Flavor::plus, 0.0});
    ev.push_back({m, Flavor::minus, 0.0});
  }
  return ev;
}

inline std::vector<MajoranaEvent> twisted_events(int n_sites, int xi, int eta, double t, int w,
                                                 int wp) {
  std::vector<MajoranaEvent> ev;
  ev.reserve(2 * (n_sites + xi - eta));
  for (int l = 1; l < xi; ++l) {
    ev.push_back({l, Flavor::plus, t});
    ev.push_back({l, Flavor::minus, t});
  }
  ev.push_back({xi, flavor_of(w), t});
  ev.push_back({eta, opposite(flavor_of(wp)), 0.0});
  for (int m = eta + 1; m <= n_sites; ++m) {
    ev.push_back({m, Flavor::plus, 0.0});
    ev.push_back({m, Flavor::minus, 0.0});
  }
  return ev;
}

inline void check_pair(const Kernel& k, int xi, int eta, const char* who) {
  check_site(k, xi, who);
  check_site(k, eta, who);
  if (xi > eta)
    throw parameter_error(std::string(who) +
                          ": requires xi <= eta; swap the arguments (the states used here are "
                          "symmetric under exchanging the two observables)");
}

}  // namespace detail

/// In-plane correlator <tau_t(sigma^w_xi) sigma^w'_eta>, w, w' in {1, 2},
/// via the Jordan-Wigner Majorana string of length 2(xi + eta - 1):
/// prefactor (-1)^(w+w') i^(xi+eta-2) times the Wick pfaffian of
/// [pairs 1..xi-1 at t] (xi, #_w, t) (eta, #_w', 0) [pairs 1..eta-1 at 0].
inline Complex sigma12_correlation_direct(const Kernel& k, int xi, int eta, double t, int w,
                                          int wp) {
  detail::check_pair(k, xi, eta, "sigma12_correlation_direct");
  const auto ev = detail::direct_events(xi, eta, t, w, wp);
  const double sgn = ((w + wp) % 2 == 0) ? 1.0 : -1.0;
  return sgn * ipow(xi + eta - 2) * wick_pfaffian(k, std::span<const MajoranaEvent>(ev));
}

/// Same correlator through the parity-twisted functional: prefactor
/// (-1)^(w+w') i^(xi+N-eta) det(O) tr(P rho) (-1)^(w'-1) times the twisted
/// Wick pfaffian over the configuration
/// [pairs 1..xi-1 at t] (xi, #_w, t) (eta, -#_w', 0) [pairs eta+1..N at 0],
/// of size 2(N + xi - eta). Agrees with the direct route on every valid input.
inline Complex sigma12_correlation_twisted(const Kernel& k, int xi, int eta, double t, int w,
                                           int wp) {
  detail::check_pair(k, xi, eta, "sigma12_correlation_twisted");
  k.require_parity();
  const auto ev = detail::twisted_events(k.sites(), xi, eta, t, w, wp);
  const double sgn = ((w + wp) % 2 == 0) ? 1.0 : -1.0;
  const double wsgn = (wp == 1) ? 1.0 : -1.0;
  return sgn * ipow(xi + k.sites() - eta) * static_cast<double>(k.det_o()) * k.parity() * wsgn *
         wick_pfaffian(k, std::span<const MajoranaEvent>(ev), /*twisted=*/true);
}

/// Slice-based variant of the direct route for grid sweeps; events at time t
/// always precede events at time 0, so only g0 and gt are needed.
inline Complex sigma12_correlation_direct(const CorrelationSlice& s, int xi, int eta, int w,
                                          int wp) {
  detail::check_pair(*s.kernel, xi, eta, "sigma12_correlation_direct");
  const auto ev = detail::direct_events(xi, eta, s.t, w, wp);
  const int n = static_cast<int>(ev.size());
  SkewMatrix m(n);
  for (int j = 0; j < n; ++j)
    for (int kk = j + 1; kk < n; ++kk) {
      const bool same_time = ev[j].time == ev[kk].time;
      const auto& g = same_time ? s.g0 : s.gt;
      m.set(j, kk, g(event_index(ev[j]), event_index(ev[kk])));
    }
  const double sgn = ((w + wp) % 2 == 0) ? 1.0 : -1.0;
  return sgn * ipow(xi + eta - 2) * skewlin::pfaffian_elimination(m);
}

/// Truncated correlator for any (w, w') in {1,2,3}^2, dispatching to the
/// appropriate route. For w, w' in {1,2} the single-site expectations vanish,
/// so no subtraction is needed.
inline Complex truncated_correlation(const CorrelationSlice& s, int xi, int eta, int w, int wp) {
  if (w == 3 && wp == 3) return sigma3_correlation(s, xi, eta);
  if (w == 3 || wp == 3) return Complex(0.0, 0.0);
  return sigma12_correlation_direct(s, xi, eta, w, wp);
}

}  // namespace pfloc::quasifree
