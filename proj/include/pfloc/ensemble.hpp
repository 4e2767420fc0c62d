// Copyright (c) 2026 pfloc developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "pfloc/errors.hpp"
#include "pfloc/quasifree.hpp"
#include "pfloc/rng.hpp"
#include "pfloc/skewlin.hpp"
#include "pfloc/xychain.hpp"

namespace pfloc::ensemble {

using skewlin::HermitianMatrix;
using skewlin::SpectralData;
using xychain::ChainParams;
using xychain::DisorderSpec;
using xychain::StateSpec;

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  static Interval all() { return {}; }
};

/// Eigenfunction correlator Q(xi, eta; I) = sum over eigenvalues in I of
/// |phi_j(xi)| |phi_j(eta)|, maximized over the two Majorana flavors at each
/// site. For spectra with degeneracies the sum form is still evaluated as
/// stated; it then upper-bounds the correlator only up to basis rotations
/// within degenerate subspaces.
inline double eigenfunction_correlator(const SpectralData& s, int xi, int eta, Interval iv) {
  const int dim = static_cast<int>(s.eigenvalues.size());
  const int n = dim / 2;
  if (xi < 1 || xi > n || eta < 1 || eta > n)
    throw parameter_error("eigenfunction_correlator: site out of range");
  double best = 0.0;
  for (int fa = 0; fa < 2; ++fa) {
    for (int fb = 0; fb < 2; ++fb) {
      const int ia = xychain::basis_index(xi, fa == 1);
      const int ib = xychain::basis_index(eta, fb == 1);
      double q = 0.0;
      for (int j = 0; j < dim; ++j) {
        const double l = s.eigenvalues[j];
        if (l < iv.lo || l > iv.hi) continue;
        q += std::abs(s.eigenvectors(ia, j)) * std::abs(s.eigenvectors(ib, j));
      }
      best = std::max(best, q);
    }
  }
  return best;
}

inline double eigenfunction_correlator(const HermitianMatrix& h, int xi, int eta, Interval iv) {
  return eigenfunction_correlator(skewlin::hermitian_eig(h), xi, eta, iv);
}

/// Deterministic pairwise reduction in index order; the tree shape depends
/// only on the length, so sums are reproducible under any parallel schedule.
inline double pairwise_sum(std::span<const double> v) {
  if (v.empty()) return 0.0;
  if (v.size() == 1) return v[0];
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

struct EnsembleConfig {
  int N = 1;
  int realizations = 1;
  DisorderSpec disorder;
  StateSpec state;
  std::vector<double> time_grid;
  std::vector<std::pair<int, int>> pairs;            // (xi, eta)
  std::vector<std::pair<int, int>> observables;      // (w, w')
  std::uint64_t seed = 0;
  int workers = 1;

  void validate() const {
    if (N < 1) throw structural_error("EnsembleConfig: N must be >= 1");
    if (realizations < 1) throw structural_error("EnsembleConfig: realizations must be >= 1");
    if (time_grid.empty()) throw structural_error("EnsembleConfig: time grid must be non-empty");
    if (pairs.empty()) throw structural_error("EnsembleConfig: at least one site pair required");
    for (auto [xi, eta] : pairs)
      if (xi < 1 || eta < 1 || xi > N || eta > N || xi > eta)
        throw structural_error("EnsembleConfig: pair out of range (need 1 <= xi <= eta <= N)");
    if (observables.empty())
      throw structural_error("EnsembleConfig: at least one observable required");
    for (auto [w, wp] : observables)
      if (w < 1 || w > 3 || wp < 1 || wp > 3)
        throw structural_error("EnsembleConfig: observable indices must be in {1,2,3}");
  }
};

struct PairStats {
  int xi = 0, eta = 0, w = 0, wp = 0;
  int distance = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  int n_effective = 0;
};

struct EnsembleResult {
  std::vector<PairStats> stats;
  int requested = 0;
  int skipped = 0;
};

namespace detail {

inline constexpr std::uint64_t kAlphaTag = 0x616c706861ULL;  // "alpha"

inline StateSpec realized_state(const EnsembleConfig& cfg, std::uint64_t realization) {
  StateSpec s = cfg.state;
  if (s.kind == StateSpec::Kind::eigenstate && s.alpha.empty()) {
    rng::Stream stream(cfg.seed, realization, kAlphaTag);
    s.alpha.resize(static_cast<std::size_t>(cfg.N));
    for (int j = 0; j < cfg.N; ++j) s.alpha[static_cast<std::size_t>(j)] = stream.bit() ? 1 : 0;
  }
  return s;
}

}  // namespace detail

/// Disorder Monte Carlo: per realization, sample a chain, build the kernel,
/// and record max over the time grid of |truncated correlator| for every
/// (pair, observable). Results are a pure function of the config (seed
/// included); the worker count only affects wall time. Realizations whose
/// state hypotheses fail (degenerate spectrum under an eigenstate) are
/// counted and skipped; more than 1% skipped aborts the run.
inline EnsembleResult run_ensemble(const EnsembleConfig& cfg) {
  cfg.validate();
  const int R = cfg.realizations;
  const std::size_t cells = cfg.pairs.size() * cfg.observables.size();
  std::vector<std::vector<double>> maxima(cells,
                                          std::vector<double>(static_cast<std::size_t>(R), 0.0));
  std::vector<char> skipped(static_cast<std::size_t>(R), 0);

  auto work = [&](int i) {
    const ChainParams params =
        xychain::sample_disorder(cfg.disorder, cfg.N, static_cast<std::uint64_t>(i));
    quasifree::Kernel kernel = [&] {
      try {
        return quasifree::Kernel::make(params, detail::realized_state(cfg, static_cast<std::uint64_t>(i)));
      } catch (const precondition_error&) {
        skipped[static_cast<std::size_t>(i)] = 1;
        throw;
      }
    }();
    for (double t : cfg.time_grid) {
      const auto slice = quasifree::CorrelationSlice::make(kernel, t);
      std::size_t cell = 0;
      for (const auto& [xi, eta] : cfg.pairs) {
        for (const auto& [w, wp] : cfg.observables) {
          const double v = std::abs(quasifree::truncated_correlation(slice, xi, eta, w, wp));
          auto& slot = maxima[cell][static_cast<std::size_t>(i)];
          slot = std::max(slot, v);
          ++cell;
        }
      }
    }
  };

  const int workers = std::max(1, std::min(cfg.workers, R));
  if (workers == 1) {
    for (int i = 0; i < R; ++i) {
      try {
        work(i);
      } catch (const precondition_error&) {
      }
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int wkr = 0; wkr < workers; ++wkr) {
      pool.emplace_back([&] {
        for (;;) {
          const int i = next.fetch_add(1);
          if (i >= R) return;
          try {
            work(i);
          } catch (const precondition_error&) {
          }
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  int n_skipped = 0;
  for (char c : skipped) n_skipped += c;
  if (static_cast<double>(n_skipped) > 0.01 * static_cast<double>(R))
    throw skip_overflow_error("run_ensemble: " + std::to_string(n_skipped) + " of " +
                              std::to_string(R) + " realizations skipped (limit is 1%)");

  EnsembleResult out;
  out.requested = R;
  out.skipped = n_skipped;
  std::size_t cell = 0;
  for (const auto& [xi, eta] : cfg.pairs) {
    for (const auto& [w, wp] : cfg.observables) {
      std::vector<double> kept;
      kept.reserve(static_cast<std::size_t>(R));
      for (int i = 0; i < R; ++i)
        if (!skipped[static_cast<std::size_t>(i)])
          kept.push_back(maxima[cell][static_cast<std::size_t>(i)]);
      PairStats ps;
      ps.xi = xi;
      ps.eta = eta;
      ps.w = w;
      ps.wp = wp;
      ps.distance = eta - xi;
      ps.n_effective = static_cast<int>(kept.size());
      const double n = static_cast<double>(kept.size());
      ps.mean = pairwise_sum(kept) / n;
      if (kept.size() >= 2) {
        std::vector<double> sq(kept.size());
        for (std::size_t j = 0; j < kept.size(); ++j) {
          const double d = kept[j] - ps.mean;
          sq[j] = d * d;
        }
        const double var = pairwise_sum(sq) / (n - 1.0);
        ps.stderr_ = std::sqrt(var / n);
      }
      out.stats.push_back(ps);
      ++cell;
    }
  }
  return out;
}

struct DecayFit {
  double rate = 0.0;
  double log_prefactor = 0.0;
  double r_squared = 0.0;
  std::vector<int> distances;
  std::vector<double> means;
};

/// Least squares of log(mean) against distance over the strictly positive
/// means; rate is the negated slope. Distances must be strictly increasing.
inline DecayFit fit_decay(std::span<const int> distances, std::span<const double> means) {
  if (distances.size() != means.size())
    throw structural_error("fit_decay: distances and means must have equal length");
  for (std::size_t i = 0; i + 1 < distances.size(); ++i)
    if (!(distances[i] < distances[i + 1]))
      throw structural_error("fit_decay: distances must be strictly increasing");

  DecayFit fit;
  for (std::size_t i = 0; i < means.size(); ++i) {
    if (means[i] > 0.0 && std::isfinite(means[i])) {
      fit.distances.push_back(distances[i]);
      fit.means.push_back(means[i]);
    }
  }
  const std::size_t n = fit.means.size();
  if (n < 3)
    throw fit_error("fit_decay: need at least 3 positive means, got " + std::to_string(n));

  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += fit.distances[i];
    sy += std::log(fit.means[i]);
  }
  const double mx = sx / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = fit.distances[i] - mx;
    const double dy = std::log(fit.means[i]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  const double slope = sxy / sxx;
  fit.rate = -slope;
  fit.log_prefactor = my - slope * mx;
  if (syy <= 1e-30) {
    fit.r_squared = 0.0;
  } else {
    double ss_res = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double pred = fit.log_prefactor + slope * fit.distances[i];
      const double res = std::log(fit.means[i]) - pred;
      ss_res += res * res;
    }
    fit.r_squared = 1.0 - ss_res / syy;
  }
  return fit;
}

}  // namespace pfloc::ensemble
