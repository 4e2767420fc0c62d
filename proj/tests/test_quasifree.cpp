// Copyright (c) 2026 pfloc developers.
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "pfloc/oracle.hpp"
#include "pfloc/quasifree.hpp"
#include "pfloc/rng.hpp"

using namespace pfloc;
using quasifree::Flavor;
using quasifree::Kernel;
using quasifree::MajoranaEvent;
using skewlin::Complex;
using xychain::ChainParams;
using xychain::StateSpec;

namespace {

ChainParams random_chain(int n, rng::Stream& s) {
  ChainParams p;
  p.N = n;
  for (int i = 0; i + 1 < n; ++i) {
    p.mu.push_back(s.uniform(0.5, 1.5));
    p.gamma.push_back(s.uniform(-0.8, 0.8));
  }
  for (int i = 0; i < n; ++i) p.nu.push_back(s.uniform(0.4, 1.8));
  return p;
}

std::vector<int> random_alpha(int n, rng::Stream& s) {
  std::vector<int> a(static_cast<std::size_t>(n));
  for (auto& b : a) b = s.bit() ? 1 : 0;
  return a;
}

}  // namespace

TEST_CASE("two_point closed forms", "[quasifree]") {
  rng::Stream s(10);
  const auto p = random_chain(4, s);
  const auto kernel = Kernel::make(p, StateSpec::thermal(1.2));

  SECTION("diagonal at equal time is one") {
    for (int x = 1; x <= p.N; ++x) {
      for (auto f : {Flavor::plus, Flavor::minus}) {
        const MajoranaEvent e{x, f, 0.7};
        REQUIRE(std::abs(quasifree::two_point(kernel, e, e) - Complex(1, 0)) < 1e-10);
      }
    }
  }
  SECTION("zero time difference reproduces the state function matrix") {
    const auto g0 = kernel.gamma(0.0);
    const MajoranaEvent a{1, Flavor::plus, 0.0};
    const MajoranaEvent b{3, Flavor::minus, 0.0};
    REQUIRE(quasifree::two_point(kernel, a, b) ==
            g0(quasifree::event_index(a), quasifree::event_index(b)));
  }
  SECTION("single site thermal <a+ a-> = -i tanh(beta nu)") {
    ChainParams single;
    single.N = 1;
    single.nu = {1.3};
    const double beta = 0.7;
    const auto k1 = Kernel::make(single, StateSpec::thermal(beta));
    const auto v = quasifree::two_point(k1, {1, Flavor::plus, 0.0}, {1, Flavor::minus, 0.0});
    REQUIRE(v.real() == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(v.imag() == Catch::Approx(-0.72113225407669981).margin(1e-12));
  }
  SECTION("matches the exact solver entrywise, including dynamics") {
    const oracle::Solver solver(p, StateSpec::thermal(1.2));
    rng::Stream st(11);
    for (int trial = 0; trial < 6; ++trial) {
      const MajoranaEvent a{1 + static_cast<int>(st.below(4)),
                            st.bit() ? Flavor::plus : Flavor::minus, st.uniform(0, 2)};
      const MajoranaEvent b{1 + static_cast<int>(st.below(4)),
                            st.bit() ? Flavor::plus : Flavor::minus, st.uniform(0, 2)};
      const auto fast = quasifree::two_point(kernel, a, b);
      const auto exact = solver.majorana_two_point(a, b);
      REQUIRE(std::abs(fast - exact) < 1e-8);
    }
  }
}

TEST_CASE("CAR structure of the equal-time matrix", "[quasifree]") {
  rng::Stream s(12);
  const auto p = random_chain(5, s);
  for (const auto& state :
       {StateSpec::thermal(0.8), StateSpec::ground_state(), StateSpec::eigenstate({1, 0, 1, 1, 0})}) {
    const auto kernel = Kernel::make(p, state);
    const auto g0 = kernel.gamma(0.0);
    const auto dev =
        (g0 + g0.transpose() - 2.0 * skewlin::Matrix::Identity(2 * p.N, 2 * p.N)).cwiseAbs().maxCoeff();
    REQUIRE(dev < 1e-10);
  }
}

TEST_CASE("wick_pfaffian", "[quasifree]") {
  rng::Stream s(13);
  const auto p = random_chain(3, s);
  const auto kernel = Kernel::make(p, StateSpec::thermal(1.0));

  SECTION("two events reduce to the two-point value") {
    const MajoranaEvent a{1, Flavor::plus, 0.4};
    const MajoranaEvent b{3, Flavor::minus, 0.0};
    std::vector<MajoranaEvent> ev = {a, b};
    REQUIRE(std::abs(quasifree::wick_pfaffian(kernel, std::span<const MajoranaEvent>(ev)) -
                     quasifree::two_point(kernel, a, b)) < 1e-12);
  }
  SECTION("four equal-time events match the three-term wick sum") {
    std::vector<MajoranaEvent> ev = {{1, Flavor::plus, 0.0},
                                     {1, Flavor::minus, 0.0},
                                     {2, Flavor::plus, 0.0},
                                     {3, Flavor::minus, 0.0}};
    auto w = [&](int i, int j) { return quasifree::two_point(kernel, ev[static_cast<std::size_t>(i)], ev[static_cast<std::size_t>(j)]); };
    const Complex expect = w(0, 1) * w(2, 3) - w(0, 2) * w(1, 3) + w(0, 3) * w(1, 2);
    REQUIRE(std::abs(quasifree::wick_pfaffian(kernel, std::span<const MajoranaEvent>(ev)) - expect) <
            1e-10);
  }
  SECTION("four dynamic events match the exact solver") {
    const oracle::Solver solver(p, StateSpec::thermal(1.0));
    std::vector<MajoranaEvent> ev = {{1, Flavor::plus, 0.9},
                                     {2, Flavor::minus, 0.9},
                                     {2, Flavor::plus, 0.0},
                                     {3, Flavor::minus, 0.0}};
    const auto fast = quasifree::wick_pfaffian(kernel, std::span<const MajoranaEvent>(ev));
    const auto exact = solver.string_expectation(ev);
    REQUIRE(std::abs(fast - exact) < 1e-8);
  }
  SECTION("odd strings give exact zero") {
    std::vector<MajoranaEvent> ev = {{1, Flavor::plus, 0.0}};
    REQUIRE(quasifree::wick_pfaffian(kernel, std::span<const MajoranaEvent>(ev)) ==
            Complex(0.0, 0.0));
  }
}

TEST_CASE("sigma^3 expectation", "[quasifree]") {
  SECTION("single-site thermal value and conventions") {
    ChainParams p;
    p.N = 1;
    p.nu = {1.3};
    const auto k = Kernel::make(p, StateSpec::thermal(0.7));
    REQUIRE(quasifree::sigma3_expectation(k, 1) ==
            Catch::Approx(0.72113225407669981).margin(1e-12));
    const auto kg = Kernel::make(p, StateSpec::ground_state());
    REQUIRE(quasifree::sigma3_expectation(kg, 1) == Catch::Approx(1.0).margin(1e-10));
  }
  SECTION("infinite-temperature limit vanishes") {
    rng::Stream s(14);
    const auto p = random_chain(4, s);
    const auto k = Kernel::make(p, StateSpec::thermal(1e-9));
    for (int x = 1; x <= 4; ++x)
      REQUIRE(std::abs(quasifree::sigma3_expectation(k, x)) < 1e-8);
  }
  SECTION("time invariance of the evolved expectation") {
    rng::Stream s(15);
    const auto p = random_chain(4, s);
    const auto k = Kernel::make(p, StateSpec::thermal(1.3));
    const int i = xychain::basis_index(2, false);
    const Complex at0 = Complex(0, 1) * k.gamma(0.0)(i, i + 1);
    for (double t : {0.5, 1.9, 3.4}) {
      const Complex att =
          Complex(0, 1) *
          quasifree::two_point(k, {2, Flavor::plus, t}, {2, Flavor::minus, t});
      REQUIRE(std::abs(att - at0) < 1e-10);
    }
  }
}

TEST_CASE("sigma^3 correlation", "[quasifree]") {
  rng::Stream s(16);
  SECTION("same site at t = 0 gives 1 - <sigma^3>^2") {
    const auto p = random_chain(4, s);
    const auto k = Kernel::make(p, StateSpec::thermal(1.5));
    for (int x = 1; x <= 4; ++x) {
      const double m = quasifree::sigma3_expectation(k, x);
      const auto c = quasifree::sigma3_correlation(k, x, x, 0.0);
      REQUIRE(c.real() == Catch::Approx(1.0 - m * m).margin(1e-10));
      REQUIRE(std::abs(c.imag()) < 1e-10);
    }
  }
  SECTION("decoupled sites are uncorrelated") {
    ChainParams p;
    p.N = 3;
    p.mu = {0.0, 0.0};
    p.gamma = {0.0, 0.0};
    p.nu = {0.4, 1.0, 1.6};
    const auto k = Kernel::make(p, StateSpec::thermal(0.9));
    REQUIRE(std::abs(quasifree::sigma3_correlation(k, 1, 3, 0.0)) < 1e-10);
  }
  SECTION("matches the exact solver on a dynamic call") {
    const auto p = random_chain(5, s);
    const auto k = Kernel::make(p, StateSpec::thermal(1.0));
    const oracle::Solver solver(p, StateSpec::thermal(1.0));
    const auto fast = quasifree::sigma3_correlation(k, 2, 4, 0.7);
    const auto exact = solver.spin_correlation(2, 4, 0.7, 3, 3);
    REQUIRE(std::abs(fast - exact) < 1e-8);
  }
}

TEST_CASE("in-plane correlators: direct route against the exact solver", "[quasifree]") {
  rng::Stream s(17);
  SECTION("same site, same component, t = 0 gives one") {
    const auto p = random_chain(4, s);
    const auto k = Kernel::make(p, StateSpec::thermal(1.1));
    for (int w : {1, 2}) {
      const auto v = quasifree::sigma12_correlation_direct(k, 2, 2, 0.0, w, w);
      REQUIRE(v.real() == Catch::Approx(1.0).margin(1e-10));
      REQUIRE(std::abs(v.imag()) < 1e-10);
    }
  }
  SECTION("all component pairs at separated sites, static") {
    const auto p = random_chain(4, s);
    const auto k = Kernel::make(p, StateSpec::thermal(1.0));
    const oracle::Solver solver(p, StateSpec::thermal(1.0));
    for (int w : {1, 2})
      for (int wp : {1, 2}) {
        const auto fast = quasifree::sigma12_correlation_direct(k, 1, 3, 0.0, w, wp);
        const auto exact = solver.spin_correlation(1, 3, 0.0, w, wp);
        REQUIRE(std::abs(fast - exact) < 1e-8);
      }
  }
  SECTION("dynamic correlators across states") {
    const auto p = random_chain(4, s);
    const std::vector<StateSpec> states = {StateSpec::thermal(0.5), StateSpec::ground_state(),
                                           StateSpec::eigenstate(random_alpha(4, s))};
    for (const auto& state : states) {
      const auto k = Kernel::make(p, state);
      const oracle::Solver solver(p, state);
      for (double t : {0.0, 0.7}) {
        for (int w : {1, 2})
          for (int wp : {1, 2}) {
            const auto fast = quasifree::sigma12_correlation_direct(k, 2, 4, t, w, wp);
            const auto exact = solver.spin_correlation(2, 4, t, w, wp);
            REQUIRE(std::abs(fast - exact) < 1e-8);
          }
      }
    }
  }
  SECTION("in-plane single-site expectations are exact zeros") {
    const auto p = random_chain(3, s);
    const auto k = Kernel::make(p, StateSpec::thermal(2.0));
    REQUIRE(quasifree::sigma12_expectation(k, 2, 1) == Complex(0.0, 0.0));
    REQUIRE(quasifree::sigma12_expectation(k, 2, 2) == Complex(0.0, 0.0));
    REQUIRE(quasifree::sigma3_cross_correlation(k, 1, 3, 0.8, 1) == Complex(0.0, 0.0));
  }
  SECTION("xi > eta is an argument error") {
    const auto p = random_chain(3, s);
    const auto k = Kernel::make(p, StateSpec::thermal(1.0));
    REQUIRE_THROWS_AS(quasifree::sigma12_correlation_direct(k, 3, 1, 0.0, 1, 1),
                      parameter_error);
  }
  SECTION("slice evaluation agrees with the kernel-level call") {
    const auto p = random_chain(5, s);
    const auto k = Kernel::make(p, StateSpec::thermal(0.9));
    const auto slice = quasifree::CorrelationSlice::make(k, 1.3);
    for (int w : {1, 2})
      for (int wp : {1, 2}) {
        const auto a = quasifree::sigma12_correlation_direct(slice, 1, 4, w, wp);
        const auto b = quasifree::sigma12_correlation_direct(k, 1, 4, 1.3, w, wp);
        REQUIRE(std::abs(a - b) < 1e-12);
      }
  }
}

TEST_CASE("in-plane correlators: twisted route", "[quasifree]") {
  rng::Stream s(18);
  SECTION("identity case") {
    const auto p = random_chain(4, s);
    const auto k = Kernel::make(p, StateSpec::thermal(1.7));
    for (int w : {1, 2}) {
      const auto v = quasifree::sigma12_correlation_twisted(k, 3, 3, 0.0, w, w);
      REQUIRE(v.real() == Catch::Approx(1.0).margin(1e-9));
      REQUIRE(std::abs(v.imag()) < 1e-9);
    }
  }
  SECTION("agrees with the direct route, thermal dynamics") {
    const auto p = random_chain(4, s);
    const auto k = Kernel::make(p, StateSpec::thermal(1.0));
    for (int w : {1, 2})
      for (int wp : {1, 2}) {
        const auto a = quasifree::sigma12_correlation_direct(k, 1, 3, 0.5, w, wp);
        const auto b = quasifree::sigma12_correlation_twisted(k, 1, 3, 0.5, w, wp);
        REQUIRE(std::abs(a - b) < 1e-9);
      }
  }
  SECTION("matches the exact solver for an eigenstate") {
    const auto p = random_chain(5, s);
    const auto alpha = random_alpha(5, s);
    const auto k = Kernel::make(p, StateSpec::eigenstate(alpha));
    const oracle::Solver solver(p, StateSpec::eigenstate(alpha));
    for (int w : {1, 2})
      for (int wp : {1, 2}) {
        const auto fast = quasifree::sigma12_correlation_twisted(k, 2, 4, 0.0, w, wp);
        const auto exact = solver.spin_correlation(2, 4, 0.0, w, wp);
        REQUIRE(std::abs(fast - exact) < 1e-8);
      }
  }
  SECTION("vanishing parity trace is a precondition error") {
    ChainParams p;
    p.N = 1;
    p.nu = {1e-13};
    const auto k = Kernel::make(p, StateSpec::thermal(1.0));
    REQUIRE_THROWS_AS(quasifree::sigma12_correlation_twisted(k, 1, 1, 0.0, 1, 1),
                      precondition_error);
  }
}

TEST_CASE("parity trace", "[quasifree]") {
  SECTION("even chain, fully unoccupied eigenstate") {
    Eigen::VectorXd l(4);
    l << 0.1, 0.5, 1.0, 2.0;
    REQUIRE(quasifree::parity_trace(StateSpec::eigenstate({0, 0, 0, 0}), l) == 1.0);
    REQUIRE(quasifree::parity_trace(StateSpec::eigenstate({1, 0, 0, 0}), l) == -1.0);
  }
  SECTION("thermal single mode equals -tanh(beta lambda)") {
    Eigen::VectorXd l(1);
    l << 1.3;
    REQUIRE(quasifree::parity_trace(StateSpec::thermal(0.7), l) ==
            Catch::Approx(-0.72113225407669981).margin(1e-14));
  }
  SECTION("large beta approaches the ground-state parity") {
    Eigen::VectorXd l(3);
    l << 0.4, 0.9, 1.7;
    REQUIRE(quasifree::parity_trace(StateSpec::thermal(300.0), l) ==
            Catch::Approx(-1.0).margin(1e-10));
    REQUIRE(quasifree::parity_trace(StateSpec::ground_state(), l) == -1.0);
  }
  SECTION("matches the exact parity expectation on a random chain") {
    rng::Stream s(19);
    const auto p = random_chain(4, s);
    const double beta = 1.2;
    const auto k = Kernel::make(p, StateSpec::thermal(beta));
    const oracle::Solver solver(p, StateSpec::thermal(beta));
    const auto exact = solver.expectation(oracle::parity_operator(p, k.det_o()));
    REQUIRE(exact.real() == Catch::Approx(k.parity()).margin(1e-10));
  }
  SECTION("twisted-thermal input is rejected") {
    Eigen::VectorXd l(2);
    l << 0.5, 1.0;
    REQUIRE_THROWS_AS(quasifree::parity_trace(StateSpec::twisted_thermal(1.0), l),
                      precondition_error);
  }
}

TEST_CASE("ground state equals the all-zero eigenstate downstream", "[quasifree]") {
  rng::Stream s(20);
  const auto p = random_chain(4, s);
  const auto kg = Kernel::make(p, StateSpec::ground_state());
  const auto ke = Kernel::make(p, StateSpec::eigenstate({0, 0, 0, 0}));
  for (double t : {0.0, 1.1}) {
    REQUIRE(std::abs(quasifree::sigma3_correlation(kg, 1, 3, t) -
                     quasifree::sigma3_correlation(ke, 1, 3, t)) < 1e-10);
    REQUIRE(std::abs(quasifree::sigma12_correlation_direct(kg, 1, 3, t, 1, 1) -
                     quasifree::sigma12_correlation_direct(ke, 1, 3, t, 1, 1)) < 1e-10);
  }
}

TEST_CASE("in-plane correlators stay inside the unit disk", "[quasifree]") {
  rng::Stream s(21);
  for (int trial = 0; trial < 5; ++trial) {
    const auto p = random_chain(2 + static_cast<int>(s.below(4)), s);
    const auto k = Kernel::make(p, StateSpec::thermal(s.uniform(0.3, 2.0)));
    const int eta = 1 + static_cast<int>(s.below(static_cast<std::uint64_t>(p.N)));
    const int xi = 1 + static_cast<int>(s.below(static_cast<std::uint64_t>(eta)));
    const double t = s.uniform(0, 3);
    const auto v = quasifree::sigma12_correlation_direct(k, xi, eta, t, 1 + s.bit(), 1 + s.bit());
    REQUIRE(std::abs(v) <= 1.0 + 1e-10);
  }
}

TEST_CASE("twisted kernel of a twisted-thermal spec is rejected at kernel level", "[quasifree]") {
  rng::Stream s(22);
  const auto p = random_chain(3, s);
  REQUIRE_THROWS_AS(Kernel::make(p, StateSpec::twisted_thermal(1.0)), precondition_error);
}
