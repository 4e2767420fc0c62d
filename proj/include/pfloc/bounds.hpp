// Copyright (c) 2026 pfloc developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pfloc/errors.hpp"
#include "pfloc/quasifree.hpp"
#include "pfloc/skewlin.hpp"

namespace pfloc::bounds {

using skewlin::Complex;
using skewlin::Matrix;
using skewlin::SkewMatrix;

// ---------------------------------------------------------------------------
// Decay profiles and the tail functional I(mu0)

/// Monotone increasing decay profile K: [0, inf) -> [0, inf).
/// exponential: K(t) = t; logarithmic: K(t) = ln(1 + t); tabulated: linear
/// interpolation on integer nodes, extrapolated with the final slope.
class DecayProfile {
 public:
  enum class Kind { exponential, logarithmic, tabulated };

  static DecayProfile exponential() { return DecayProfile(Kind::exponential, {}); }
  static DecayProfile logarithmic() { return DecayProfile(Kind::logarithmic, {}); }
  static DecayProfile tabulated(std::vector<double> values) {
    if (values.size() < 2)
      throw parameter_error("tabulated decay profile needs at least two nodes");
    for (std::size_t i = 0; i + 1 < values.size(); ++i)
      if (!(values[i + 1] >= values[i]))
        throw structural_error("tabulated decay profile must be monotone increasing");
    if (values.front() < 0)
      throw structural_error("decay profile must be non-negative");
    return DecayProfile(Kind::tabulated, std::move(values));
  }

  Kind kind() const { return kind_; }

  double operator()(double tau) const {
    if (tau < 0) throw parameter_error("decay profile argument must be >= 0");
    switch (kind_) {
      case Kind::exponential: return tau;
      case Kind::logarithmic: return std::log1p(tau);
      case Kind::tabulated: {
        const double last = static_cast<double>(values_.size() - 1);
        if (tau >= last) return values_.back() + final_slope() * (tau - last);
        const auto lo = static_cast<std::size_t>(std::floor(tau));
        const double frac = tau - static_cast<double>(lo);
        return values_[lo] + frac * (values_[lo + 1] - values_[lo]);
      }
    }
    throw parameter_error("unknown decay profile kind");
  }

  double final_slope() const {
    return values_.size() >= 2 ? values_[values_.size() - 1] - values_[values_.size() - 2] : 0.0;
  }

 private:
  DecayProfile(Kind k, std::vector<double> v) : kind_(k), values_(std::move(v)) {}
  Kind kind_;
  std::vector<double> values_;
};

namespace detail {

/// Exact tail of sum_{l>=L} (1+l) q^l for q in (0,1).
inline double geometric_tail(double q, std::int64_t L) {
  const double qL = std::pow(q, static_cast<double>(L));
  return qL * ((1.0 + static_cast<double>(L)) / (1.0 - q) + q / ((1.0 - q) * (1.0 - q)));
}

}  // namespace detail

/// I(mu0) = sum_{l>=0} (1+l) exp(-mu0 K(l)), summed until a profile-specific
/// analytic tail bound drops below tol. Divergent combinations (logarithmic
/// profile with mu0 <= 2, flat tabulated tails) raise divergence_error.
inline double tail_sum_I(double mu0, const DecayProfile& k, double tol = 1e-12) {
  if (!(mu0 > 0)) throw parameter_error("tail_sum_I: mu0 must be > 0");
  if (!(tol > 0)) throw parameter_error("tail_sum_I: tol must be > 0");

  switch (k.kind()) {
    case DecayProfile::Kind::logarithmic:
      if (mu0 <= 2.0)
        throw divergence_error("tail_sum_I: (1+l)^(1-mu0) diverges for mu0 <= 2, got mu0 = " +
                               std::to_string(mu0));
      break;
    case DecayProfile::Kind::tabulated:
      if (!(k.final_slope() > 0))
        throw divergence_error("tail_sum_I: tabulated profile tail is flat; the series diverges");
      break;
    case DecayProfile::Kind::exponential:
      break;
  }

  double sum = 0.0;
  for (std::int64_t l = 0;; ++l) {
    sum += (1.0 + static_cast<double>(l)) * std::exp(-mu0 * k(static_cast<double>(l)));
    const std::int64_t next = l + 1;
    double tail = 0.0;
    switch (k.kind()) {
      case DecayProfile::Kind::exponential:
        tail = detail::geometric_tail(std::exp(-mu0), next);
        break;
      case DecayProfile::Kind::logarithmic:
        // integral comparison: sum_{l>=L} (1+l)^(1-mu0) <= L^(2-mu0)/(mu0-2)
        tail = std::pow(static_cast<double>(next), 2.0 - mu0) / (mu0 - 2.0);
        break;
      case DecayProfile::Kind::tabulated: {
        const double q = std::exp(-mu0 * k.final_slope());
        tail = std::exp(-mu0 * (k(static_cast<double>(next)) -
                                k.final_slope() * static_cast<double>(next))) *
               detail::geometric_tail(q, next);
        break;
      }
    }
    if (tail < tol) return sum;
    if (l > 100000000)
      throw divergence_error("tail_sum_I: partial sums did not settle within budget");
  }
}

// ---------------------------------------------------------------------------
// Configuration distances

/// Pair of same-length strictly increasing fermionic site configurations.
struct FermionConfigPair {
  std::vector<int> x;
  std::vector<int> y;

  void validate() const {
    if (x.size() != y.size()) throw structural_error("FermionConfigPair: length mismatch");
    if (x.empty()) throw structural_error("FermionConfigPair: empty configuration");
    auto strict = [](const std::vector<int>& v) {
      for (std::size_t i = 0; i + 1 < v.size(); ++i)
        if (!(v[i] < v[i + 1])) return false;
      return true;
    };
    if (!strict(x) || !strict(y))
      throw structural_error("FermionConfigPair: configurations must be strictly increasing");
  }
};

/// D(x, y) = max_j |x_j - y_j|; coincides with the min over particle
/// relabelings of the max displacement for ordered configurations.
inline std::int64_t distance_D(const FermionConfigPair& c) {
  c.validate();
  std::int64_t d = 0;
  for (std::size_t j = 0; j < c.x.size(); ++j)
    d = std::max<std::int64_t>(d, std::abs(static_cast<std::int64_t>(c.x[j]) - c.y[j]));
  return d;
}

/// D1(x, y) = sum_j |x_j - y_j| (the minimal total displacement in 1d).
inline std::int64_t distance_D1(const FermionConfigPair& c) {
  c.validate();
  std::int64_t d = 0;
  for (std::size_t j = 0; j < c.x.size(); ++j)
    d += std::abs(static_cast<std::int64_t>(c.x[j]) - c.y[j]);
  return d;
}

/// Majorana configuration distance r(x) = max_j |x_{2j} - x_{2j-1}| over the
/// site-sorted event list.
inline std::int64_t distance_r(const quasifree::MajoranaConfig& c) {
  if (!c.even()) throw size_error("distance_r: configuration must have even length");
  if (c.events.empty()) return 0;
  std::vector<int> sites;
  sites.reserve(c.events.size());
  for (const auto& e : c.events) sites.push_back(e.site);
  std::sort(sites.begin(), sites.end());
  std::int64_t r = 0;
  for (std::size_t j = 0; j + 1 < sites.size(); j += 2)
    r = std::max<std::int64_t>(r, std::abs(static_cast<std::int64_t>(sites[j + 1]) - sites[j]));
  return r;
}

// ---------------------------------------------------------------------------
// Bound reports

/// Outcome of one inequality check. The slack term absorbs floating-point
/// noise only; the inequalities themselves are proven, so any larger
/// violation indicates a bug.
struct BoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
  double margin = 0.0;
  nlohmann::json context;

  static BoundReport make(double lhs, double rhs, nlohmann::json context = {}) {
    BoundReport r;
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = rhs - lhs;
    r.satisfied = lhs <= rhs + 1e-12 * std::max(1.0, rhs);
    r.context = std::move(context);
    return r;
  }
};

// ---------------------------------------------------------------------------
// Bordered determinant bound

/// Blocks of an (n+1)x(n+1) matrix split as
///   [ alpha  v1^T  v2^T ]
///   [ w1     A     B    ]
///   [ w2     C     D    ]
/// with v1, w1 of length p and v2, w2 of length q.
struct DetBlocks {
  Complex alpha;
  Eigen::VectorXcd v1, v2, w1, w2;
  Matrix A, B, C, D;

  void validate() const {
    const auto p = v1.size();
    const auto q = v2.size();
    if (w1.size() != p || w2.size() != q || A.rows() != p || A.cols() != p || B.rows() != p ||
        B.cols() != q || C.rows() != q || C.cols() != p || D.rows() != q || D.cols() != q)
      throw structural_error("DetBlocks: inconsistent block shapes");
  }
};

/// Extracts the blocks for a given border split p (0 <= p <= n).
inline DetBlocks split_det_blocks(const Matrix& m, Eigen::Index p) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw structural_error("split_det_blocks: square non-empty matrix required");
  const Eigen::Index n = m.rows() - 1;
  if (p < 0 || p > n) throw parameter_error("split_det_blocks: p out of range");
  const Eigen::Index q = n - p;
  DetBlocks b;
  b.alpha = m(0, 0);
  b.v1 = m.row(0).segment(1, p).transpose();
  b.v2 = m.row(0).segment(1 + p, q).transpose();
  b.w1 = m.col(0).segment(1, p);
  b.w2 = m.col(0).segment(1 + p, q);
  b.A = m.block(1, 1, p, p);
  b.B = m.block(1, 1 + p, p, q);
  b.C = m.block(1 + p, 1, q, p);
  b.D = m.block(1 + p, 1 + p, q, q);
  return b;
}

/// Right-hand side of the bordered determinant bound for ||M|| <= 1:
/// |alpha| + ||v2|| + ||w1|| + ||B|| + 2 sqrt(||v1|| (||w1|| + ||B||)),
/// with Euclidean vector norms and the spectral norm for B.
inline double bordered_det_rhs(const DetBlocks& b) {
  b.validate();
  const double nv1 = b.v1.norm();
  const double nv2 = b.v2.norm();
  const double nw1 = b.w1.norm();
  const double nB = skewlin::spectral_norm(b.B);
  return std::abs(b.alpha) + nv2 + nw1 + nB + 2.0 * std::sqrt(nv1 * (nw1 + nB));
}

// ---------------------------------------------------------------------------
// Bordered pfaffian bound

/// Blocks of a skew-symmetric 2(n+1) x 2(n+1) matrix split as
///   [ 0  alpha  v1^T  v2^T ]
///   [    0      w1^T  w2^T ]
///   [           A     B    ]
///   [                 C    ]
/// with v1, w1 of length 2p and v2, w2 of length 2q; the lower triangle is
/// fixed by skew-symmetry.
struct PfBlocks {
  Complex alpha;
  Eigen::VectorXcd v1, v2, w1, w2;
  Matrix A, B, C;

  void validate() const {
    const auto p2 = v1.size();
    const auto q2 = v2.size();
    if (p2 % 2 != 0 || q2 % 2 != 0 || w1.size() != p2 || w2.size() != q2 || A.rows() != p2 ||
        A.cols() != p2 || B.rows() != p2 || B.cols() != q2 || C.rows() != q2 || C.cols() != q2)
      throw structural_error("PfBlocks: inconsistent block shapes");
  }
};

inline PfBlocks split_pf_blocks(const Matrix& m, Eigen::Index p) {
  if (m.rows() != m.cols() || m.rows() < 2 || m.rows() % 2 != 0)
    throw structural_error("split_pf_blocks: even-dimensional matrix of size >= 2 required");
  const Eigen::Index n = m.rows() / 2 - 1;
  if (p < 0 || p > n) throw parameter_error("split_pf_blocks: p out of range");
  const Eigen::Index p2 = 2 * p;
  const Eigen::Index q2 = 2 * (n - p);
  PfBlocks b;
  b.alpha = m(0, 1);
  b.v1 = m.row(0).segment(2, p2).transpose();
  b.v2 = m.row(0).segment(2 + p2, q2).transpose();
  b.w1 = m.row(1).segment(2, p2).transpose();
  b.w2 = m.row(1).segment(2 + p2, q2).transpose();
  b.A = m.block(2, 2, p2, p2);
  b.B = m.block(2, 2 + p2, p2, q2);
  b.C = m.block(2 + p2, 2 + p2, q2, q2);
  return b;
}

inline double one_norm(const Eigen::VectorXcd& v) { return v.cwiseAbs().sum(); }

/// Sum over rows of the 1-norms of B, i.e. the entrywise absolute sum.
inline double row_one_norm_sum(const Matrix& b) { return b.cwiseAbs().sum(); }

/// Right-hand side of the bordered pfaffian bound for a matrix with a depth-2
/// correlation structure of constant M0:
/// M0 (|alpha| + ||v2||_1 + ||v1||_1 ||w1||_1 + ||v1||_1 ||w2||_1 sum_j ||r_j(B)||_1).
inline double pfaffian_bound_rhs(double m0, const PfBlocks& b) {
  b.validate();
  if (!(m0 > 0)) throw parameter_error("pfaffian_bound_rhs: M0 must be > 0");
  const double nv1 = one_norm(b.v1);
  const double nv2 = one_norm(b.v2);
  const double nw1 = one_norm(b.w1);
  const double nw2 = one_norm(b.w2);
  return m0 * (std::abs(b.alpha) + nv2 + nv1 * nw1 + nv1 * nw2 * row_one_norm_sum(b.B));
}

// ---------------------------------------------------------------------------
// Correlation-structure certification

namespace detail {

inline Matrix drop_rows_cols(const Matrix& m, const std::vector<int>& drop) {
  const int n = static_cast<int>(m.rows());
  std::vector<char> gone(static_cast<std::size_t>(n), 0);
  for (int d : drop) gone[static_cast<std::size_t>(d)] = 1;
  const int k = n - static_cast<int>(drop.size());
  Matrix out(k, k);
  int oi = 0;
  for (int i = 0; i < n; ++i) {
    if (gone[static_cast<std::size_t>(i)]) continue;
    int oj = 0;
    for (int j = 0; j < n; ++j) {
      if (gone[static_cast<std::size_t>(j)]) continue;
      out(oi, oj) = m(i, j);
      ++oj;
    }
    ++oi;
  }
  return out;
}

template <typename Fn>
inline bool for_each_subset(int n, int k, Fn&& fn) {
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::function<bool(int, int)> rec = [&](int start, int depth) -> bool {
    if (depth == k) return fn(idx);
    for (int i = start; i < n; ++i) {
      idx[static_cast<std::size_t>(depth)] = i;
      if (!rec(i + 1, depth + 1)) return false;
    }
    return true;
  };
  return rec(0, 0);
}

}  // namespace detail

/// Exhaustively certifies a correlation structure of depth k with constant M0:
/// every sub-pfaffian obtained by deleting up to 2k row/column pairs has
/// modulus at most M0 (up to a small floating-point allowance). Deleting zero
/// pairs checks |pf M| <= M0 itself; deleting everything leaves the empty
/// pfaffian 1, so M0 >= 1 is necessary once 2k reaches the dimension.
inline bool correlation_depth_check(const SkewMatrix& m, int k, double m0, double fp_slack = 1e-9) {
  if (k < 0) throw parameter_error("correlation_depth_check: k must be >= 0");
  const int n = m.dim();
  double budget = 0;
  for (int l = 0; l <= k; ++l) {
    double c = 1;
    for (int i = 0; i < 2 * l; ++i) c *= static_cast<double>(n - i) / (i + 1);
    budget += c;
  }
  if (budget > 20000.0)
    throw size_error("correlation_depth_check: enumeration budget exceeded for dim " +
                     std::to_string(n) + ", depth " + std::to_string(k));
  const double cap = m0 + fp_slack * std::max(1.0, m0);
  for (int l = 0; l <= k; ++l) {
    if (2 * l > n) {
      if (1.0 > cap) return false;  // empty pfaffian convention
      continue;
    }
    const bool ok = detail::for_each_subset(n, 2 * l, [&](const std::vector<int>& drop) {
      const Matrix sub = detail::drop_rows_cols(m.entries(), drop);
      const Complex pf = skewlin::pfaffian_elimination(SkewMatrix::from_upper(sub));
      return std::abs(pf) <= cap;
    });
    if (!ok) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Theorem right-hand sides

/// Multipoint determinant decay bound:
/// 8 max(CI, sqrt(CI)) exp(-(mu - mu0)/2 K(D/2)) with I = I(mu0).
inline double thm_det_rhs(double c, double mu, double mu0, const DecayProfile& k,
                          std::int64_t dist) {
  if (!(mu > mu0)) throw parameter_error("thm_det_rhs: requires mu > mu0");
  if (!(c > 0)) throw parameter_error("thm_det_rhs: requires C > 0");
  const double i = tail_sum_I(mu0, k);
  const double ci = c * i;
  return 8.0 * std::max(ci, std::sqrt(ci)) *
         std::exp(-0.5 * (mu - mu0) * k(static_cast<double>(dist) / 2.0));
}

/// Multipoint pfaffian decay bound with the proof-explicit constant:
/// M0 [ C e^{-mu K(r)} + 2CI(1 + 2CI) e^{-(mu-mu0) K(r)} + 16 C^3 I^3 e^{-(mu-mu0) K(r)} ].
inline double thm_pf_rhs(double m0, double c, double mu, double mu0, const DecayProfile& k,
                         std::int64_t r) {
  if (!(mu > mu0)) throw parameter_error("thm_pf_rhs: requires mu > mu0");
  if (!(c > 0) || !(m0 > 0)) throw parameter_error("thm_pf_rhs: requires C > 0 and M0 > 0");
  const double i = tail_sum_I(mu0, k);
  const double ci = c * i;
  const double kr = k(static_cast<double>(r));
  const double slow = std::exp(-(mu - mu0) * kr);
  return m0 * (c * std::exp(-mu * kr) + 2.0 * ci * (1.0 + 2.0 * ci) * slow +
               16.0 * ci * ci * ci * slow);
}

// ---------------------------------------------------------------------------
// Distance-driven block splits (diagnostics)

/// Measured two-point envelope: rho_hat(x, y) >= sup over the time set of the
/// relevant matrix elements between sites x and y; zero outside the lattice.
using RhoHat = std::function<double(int, int)>;

struct SplitNorms {
  double v1 = 0, v2 = 0, w1 = 0, w2 = 0, B = 0;
};

struct DetSplitDiag {
  int j0 = 0;             // optimizing pair, 0-based after validation
  bool swapped = false;   // whether the roles of x and y were interchanged
  std::int64_t delta = 0; // D(x, y)
  DetBlocks blocks;
  SplitNorms norms;        // Euclidean norms, spectral norm for B
  SplitNorms lemma_bounds; // envelope sums dominating v2, w1, B
  bool within_bounds = false;
};

/// Splits the multipoint correlation matrix M(j, k) = <x_j| rho |y_k> at the
/// distance-optimizing pair: relabel j0 -> 1, partition the remaining indices
/// by the midpoint threshold y_k <= x_1 + D/2, and report the border norms
/// together with the envelope sums that dominate them.
inline DetSplitDiag block_split_det(const Matrix& m, const FermionConfigPair& c,
                                    const RhoHat& rho_hat, int site_lo, int site_hi) {
  c.validate();
  const int n = static_cast<int>(c.x.size());
  if (m.rows() != n || m.cols() != n)
    throw structural_error("block_split_det: matrix size must match the configuration");

  DetSplitDiag diag;
  std::vector<int> xs = c.x, ys = c.y;
  Matrix work = m;

  // Locate the optimizing pair (smallest index on ties).
  std::int64_t best = -1;
  int j0 = 0;
  for (int j = 0; j < n; ++j) {
    const std::int64_t d = std::abs(static_cast<std::int64_t>(xs[j]) - ys[j]);
    if (d > best) {
      best = d;
      j0 = j;
    }
  }
  diag.delta = best;
  diag.j0 = j0;

  // Orientation x_{j0} <= y_{j0}; otherwise swap the roles of x and y, which
  // transposes the matrix.
  if (xs[j0] > ys[j0]) {
    std::swap(xs, ys);
    work = m.transpose();
    diag.swapped = true;
  }

  // Relabel j0 -> 0, everything before it shifts back by one.
  std::vector<int> order;
  order.push_back(j0);
  for (int j = 0; j < n; ++j)
    if (j != j0) order.push_back(j);
  Matrix perm(n, n);
  std::vector<int> px(static_cast<std::size_t>(n)), py(static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) {
    px[static_cast<std::size_t>(r)] = xs[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])];
    py[static_cast<std::size_t>(r)] = ys[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])];
    for (int s = 0; s < n; ++s)
      perm(r, s) = work(order[static_cast<std::size_t>(r)], order[static_cast<std::size_t>(s)]);
  }

  // Partition columns 1..n-1 by the midpoint rule 2 y_k <= 2 x_1 + delta,
  // keeping relative order; the same partition applies to rows, which keeps A
  // and D square.
  std::vector<int> near, far;
  for (int kk = 1; kk < n; ++kk) {
    if (2 * py[static_cast<std::size_t>(kk)] <= 2 * px[0] + static_cast<int>(diag.delta))
      near.push_back(kk);
    else
      far.push_back(kk);
  }
  std::vector<int> final_order;
  final_order.push_back(0);
  for (int i : near) final_order.push_back(i);
  for (int i : far) final_order.push_back(i);
  Matrix arranged(n, n);
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s)
      arranged(r, s) = perm(final_order[static_cast<std::size_t>(r)],
                            final_order[static_cast<std::size_t>(s)]);

  diag.blocks = split_det_blocks(arranged, static_cast<Eigen::Index>(near.size()));
  diag.norms.v1 = diag.blocks.v1.norm();
  diag.norms.v2 = diag.blocks.v2.norm();
  diag.norms.w1 = diag.blocks.w1.norm();
  diag.norms.w2 = diag.blocks.w2.norm();
  diag.norms.B = skewlin::spectral_norm(diag.blocks.B);

  // Envelope sums from the splitting geometry. l ranges over the lattice.
  const int x1 = px[0];
  const int y1 = py[0];
  const std::int64_t d = diag.delta;
  double sv2 = 0, sw1 = 0, sB = 0;
  for (std::int64_t l = d / 2 + 1;; ++l) {
    const std::int64_t site = x1 + l;
    if (site > site_hi) break;
    sv2 += rho_hat(x1, static_cast<int>(site));
  }
  for (std::int64_t l = d + 1;; ++l) {
    const std::int64_t site = y1 - l;
    if (site < site_lo) break;
    sw1 += rho_hat(static_cast<int>(site), y1);
  }
  for (std::int64_t l = 1;; ++l) {
    const std::int64_t row_site = x1 - l;
    if (row_site < site_lo) break;
    for (std::int64_t lp = d / 2 + 1;; ++lp) {
      const std::int64_t col_site = x1 + lp;
      if (col_site > site_hi) break;
      sB += rho_hat(static_cast<int>(row_site), static_cast<int>(col_site));
    }
  }
  diag.lemma_bounds.v2 = sv2;
  diag.lemma_bounds.w1 = sw1;
  diag.lemma_bounds.B = sB;
  const double fp = 1e-9;
  diag.within_bounds = diag.norms.v2 <= sv2 + fp && diag.norms.w1 <= sw1 + fp &&
                       diag.norms.B <= sB + fp;
  return diag;
}

struct PfSplitDiag {
  int j0 = 0;
  std::int64_t r = 0;
  PfBlocks blocks;
  SplitNorms norms;        // 1-norms; B is the entrywise absolute sum
  SplitNorms lemma_bounds; // envelope sums with the two-Majoranas-per-site factor
  bool within_bounds = false;
};

/// Splits a Majorana Wick matrix at the pair realizing r(x). The configuration
/// must be site-ordered and carry distinct events; the matrix rows/columns
/// must match the event order.
inline PfSplitDiag block_split_pf(const Matrix& m, const quasifree::MajoranaConfig& c,
                                  const RhoHat& rho_hat, int site_lo, int site_hi) {
  if (!c.even() || c.events.empty())
    throw structural_error("block_split_pf: non-empty even configuration required");
  if (!c.has_distinct_events())
    throw structural_error("block_split_pf: events must be pairwise distinct");
  const int two_n = static_cast<int>(c.events.size());
  if (m.rows() != two_n || m.cols() != two_n)
    throw structural_error("block_split_pf: matrix size must match the configuration");
  for (int i = 0; i + 1 < two_n; ++i)
    if (c.events[static_cast<std::size_t>(i)].site > c.events[static_cast<std::size_t>(i + 1)].site)
      throw structural_error("block_split_pf: events must be ordered by site");

  const int n_pairs = two_n / 2;
  PfSplitDiag diag;
  std::int64_t best = -1;
  for (int j = 0; j < n_pairs; ++j) {
    const std::int64_t d = std::abs(
        static_cast<std::int64_t>(c.events[static_cast<std::size_t>(2 * j + 1)].site) -
        c.events[static_cast<std::size_t>(2 * j)].site);
    if (d > best) {
      best = d;
      diag.j0 = j;
    }
  }
  diag.r = best;

  // Move the optimizing pair to the front, preserving the order of the rest.
  std::vector<int> order;
  order.push_back(2 * diag.j0);
  order.push_back(2 * diag.j0 + 1);
  for (int i = 0; i < two_n; ++i)
    if (i != 2 * diag.j0 && i != 2 * diag.j0 + 1) order.push_back(i);
  Matrix arranged(two_n, two_n);
  for (int r = 0; r < two_n; ++r)
    for (int s = 0; s < two_n; ++s)
      arranged(r, s) =
          m(order[static_cast<std::size_t>(r)], order[static_cast<std::size_t>(s)]);

  diag.blocks = split_pf_blocks(arranged, static_cast<Eigen::Index>(diag.j0));
  diag.norms.v1 = one_norm(diag.blocks.v1);
  diag.norms.v2 = one_norm(diag.blocks.v2);
  diag.norms.w1 = one_norm(diag.blocks.w1);
  diag.norms.w2 = one_norm(diag.blocks.w2);
  diag.norms.B = row_one_norm_sum(diag.blocks.B);

  const int xa = c.events[static_cast<std::size_t>(2 * diag.j0)].site;
  const int xb = c.events[static_cast<std::size_t>(2 * diag.j0 + 1)].site;
  auto left_sum = [&](int from) {
    double s = 0;
    for (int l = 0;; ++l) {
      const int site = xa - l;
      if (site < site_lo) break;
      s += rho_hat(from, site);
    }
    return 2.0 * s;
  };
  auto right_sum = [&](int from) {
    double s = 0;
    for (int l = 0;; ++l) {
      const int site = xb + l;
      if (site > site_hi) break;
      s += rho_hat(from, site);
    }
    return 2.0 * s;
  };
  diag.lemma_bounds.v1 = left_sum(xa);
  diag.lemma_bounds.v2 = right_sum(xa);
  diag.lemma_bounds.w1 = left_sum(xb);
  diag.lemma_bounds.w2 = right_sum(xb);
  double sB = 0;
  for (int l = 0;; ++l) {
    const int row_site = xa - l;
    if (row_site < site_lo) break;
    for (int lp = 0;; ++lp) {
      const int col_site = xb + lp;
      if (col_site > site_hi) break;
      sB += rho_hat(row_site, col_site);
    }
  }
  diag.lemma_bounds.B = 4.0 * sB;

  const double fp = 1e-9;
  diag.within_bounds = diag.norms.v1 <= diag.lemma_bounds.v1 + fp &&
                       diag.norms.v2 <= diag.lemma_bounds.v2 + fp &&
                       diag.norms.w1 <= diag.lemma_bounds.w1 + fp &&
                       diag.norms.w2 <= diag.lemma_bounds.w2 + fp &&
                       diag.norms.B <= diag.lemma_bounds.B + fp;
  return diag;
}

}  // namespace pfloc::bounds
