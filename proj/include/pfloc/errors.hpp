// Copyright (c) 2026 pfloc developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace pfloc {

/// Base class of every error thrown by this library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a structural invariant (non-Hermitian, non-skew, odd dimension, ...).
class structural_error : public error {
 public:
  using error::error;
};

/// A documented precondition does not hold (degenerate spectrum, vanishing parity trace, ...).
class precondition_error : public error {
 public:
  using error::error;
};

/// A scalar function was evaluated outside its domain; carries the offending point.
class domain_error : public error {
 public:
  domain_error(const std::string& what, double offending)
      : error(what), offending_(offending) {}
  double offending() const { return offending_; }

 private:
  double offending_ = 0.0;
};

/// Requested size exceeds a hard cap (exponential-cost oracle paths, enumeration budgets).
class size_error : public error {
 public:
  using error::error;
};

/// Scalar parameter out of range.
class parameter_error : public error {
 public:
  using error::error;
};

/// A series failed to converge within budget.
class divergence_error : public error {
 public:
  using error::error;
};

/// Not enough usable data for a regression.
class fit_error : public error {
 public:
  using error::error;
};

/// Too many Monte Carlo realizations had to be skipped.
class skip_overflow_error : public error {
 public:
  using error::error;
};

/// File or format problem.
class io_error : public error {
 public:
  using error::error;
};

}  // namespace pfloc
