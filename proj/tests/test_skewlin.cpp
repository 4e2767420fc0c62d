// Copyright (c) 2026 pfloc developers.
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <complex>

#include "pfloc/rng.hpp"
#include "pfloc/skewlin.hpp"

using namespace pfloc;
using skewlin::Complex;
using skewlin::Matrix;

namespace {

Matrix random_complex(int n, rng::Stream& s) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Complex(s.gaussian(), s.gaussian());
  return m;
}

skewlin::SkewMatrix random_skew(int n, rng::Stream& s) {
  skewlin::SkewMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) m.set(i, j, Complex(s.gaussian(), s.gaussian()));
  return m;
}

Eigen::MatrixXd random_real_skew(int n, rng::Stream& s) {
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      k(i, j) = s.gaussian();
      k(j, i) = -k(i, j);
    }
  return k;
}

}  // namespace

TEST_CASE("hermitian_eig on closed-form inputs", "[skewlin]") {
  SECTION("pauli sigma^2 has eigenvalues -1, +1") {
    Matrix h(2, 2);
    h << 0.0, Complex(0, -1), Complex(0, 1), 0.0;
    const auto s = skewlin::hermitian_eig(skewlin::HermitianMatrix::from_dense(h));
    REQUIRE(s.eigenvalues[0] == Catch::Approx(-1.0).margin(1e-12));
    REQUIRE(s.eigenvalues[1] == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("identity in dimension 4") {
    const auto s = skewlin::hermitian_eig(skewlin::HermitianMatrix::from_dense(Matrix::Identity(4, 4)));
    for (int j = 0; j < 4; ++j) REQUIRE(s.eigenvalues[j] == Catch::Approx(1.0).margin(1e-12));
    REQUIRE((s.eigenvectors.adjoint() * s.eigenvectors - Matrix::Identity(4, 4)).norm() < 1e-10);
  }
  SECTION("diagonal input sorts ascending") {
    Matrix h = Matrix::Zero(3, 3);
    h(0, 0) = 3;
    h(1, 1) = -2;
    h(2, 2) = 0;
    const auto s = skewlin::hermitian_eig(skewlin::HermitianMatrix::from_dense(h));
    REQUIRE(s.eigenvalues[0] == Catch::Approx(-2.0));
    REQUIRE(s.eigenvalues[1] == Catch::Approx(0.0).margin(1e-14));
    REQUIRE(s.eigenvalues[2] == Catch::Approx(3.0));
  }
  SECTION("non-Hermitian input is rejected") {
    Matrix h = Matrix::Zero(2, 2);
    h(0, 1) = 1.0;
    REQUIRE_THROWS_AS(skewlin::HermitianMatrix::from_dense(h), structural_error);
  }
  SECTION("eigenpair residuals stay below 1e-10 * |H|") {
    rng::Stream s(77);
    Matrix m = random_complex(12, s);
    Matrix h = (m + m.adjoint()) / 2.0;
    const auto sd = skewlin::hermitian_eig(skewlin::HermitianMatrix::from_dense(h));
    const double scale = skewlin::spectral_norm(h);
    for (int j = 0; j < 12; ++j) {
      const double res = (h * sd.eigenvectors.col(j) - sd.eigenvalues[j] * sd.eigenvectors.col(j)).norm();
      REQUIRE(res <= 1e-10 * scale);
    }
  }
}

TEST_CASE("matrix_function", "[skewlin]") {
  rng::Stream s(101);
  Matrix m = random_complex(8, s);
  Matrix h = (m + m.adjoint()) / 2.0;
  const auto sd = skewlin::hermitian_eig(skewlin::HermitianMatrix::from_dense(h));

  SECTION("identity map reconstructs the input") {
    const Matrix back = skewlin::matrix_function(sd, [](double l) { return Complex(l, 0); });
    REQUIRE((back - h).cwiseAbs().maxCoeff() < 1e-10);
  }
  SECTION("constant one gives the identity") {
    const Matrix one = skewlin::matrix_function(sd, [](double) { return Complex(1, 0); });
    REQUIRE((one - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);
  }
  SECTION("phase map gives a unitary") {
    const double t = 0.83;
    const Matrix u = skewlin::matrix_function(
        sd, [t](double l) { return std::exp(Complex(0, -2.0 * t * l)); });
    REQUIRE((u * u.adjoint() - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);
  }
  SECTION("thermal weight at the origin") {
    const double beta = 1.7;
    auto f = [beta](double l) { return 2.0 / (1.0 + std::exp(-2.0 * beta * l)); };
    REQUIRE(f(0.0) == Catch::Approx(1.0));
  }
  SECTION("non-finite value raises a domain error carrying the eigenvalue") {
    try {
      skewlin::matrix_function(sd, [](double) { return Complex(std::nan(""), 0); });
      FAIL("expected domain_error");
    } catch (const domain_error& e) {
      REQUIRE(std::isfinite(e.offending()));
    }
  }
}

TEST_CASE("spectral_norm", "[skewlin]") {
  REQUIRE(skewlin::spectral_norm(Matrix::Identity(5, 5)) == Catch::Approx(1.0).epsilon(1e-10));

  rng::Stream s(5);
  Eigen::VectorXcd u(6), v(6);
  for (int i = 0; i < 6; ++i) {
    u[i] = Complex(s.gaussian(), s.gaussian());
    v[i] = Complex(s.gaussian(), s.gaussian());
  }
  u.normalize();
  v.normalize();
  const Matrix rank1 = u * v.adjoint();
  REQUIRE(skewlin::spectral_norm(rank1) == Catch::Approx(1.0).epsilon(1e-8));

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 0.3;
  d(1, 1) = -0.7;
  REQUIRE(skewlin::spectral_norm(d) == Catch::Approx(0.7).epsilon(1e-10));
}

TEST_CASE("pfaffian closed forms", "[skewlin]") {
  SECTION("2x2") {
    skewlin::SkewMatrix m(2);
    m.set(0, 1, Complex(2.5, -1.0));
    REQUIRE(skewlin::pfaffian_elimination(m) == Complex(2.5, -1.0));
    REQUIRE(skewlin::pfaffian_laplace(m) == Complex(2.5, -1.0));
  }
  SECTION("4x4 expansion m12 m34 - m13 m24 + m14 m23") {
    rng::Stream s(11);
    skewlin::SkewMatrix m = random_skew(4, s);
    const Complex expect =
        m(0, 1) * m(2, 3) - m(0, 2) * m(1, 3) + m(0, 3) * m(1, 2);
    REQUIRE(std::abs(skewlin::pfaffian_elimination(m) - expect) < 1e-12 * std::abs(expect));
    REQUIRE(std::abs(skewlin::pfaffian_laplace(m) - expect) < 1e-12 * std::abs(expect));
  }
  SECTION("block direct sum multiplies") {
    skewlin::SkewMatrix m(4);
    m.set(0, 1, 1.0);
    m.set(2, 3, 2.0);
    REQUIRE(skewlin::pfaffian_elimination(m) == Complex(2.0, 0.0));
  }
  SECTION("empty matrix has pfaffian one") {
    skewlin::SkewMatrix m(0);
    REQUIRE(skewlin::pfaffian_laplace(m) == Complex(1.0, 0.0));
    REQUIRE(skewlin::pfaffian_elimination(m) == Complex(1.0, 0.0));
  }
  SECTION("odd dimension is rejected at the type level") {
    REQUIRE_THROWS_AS(skewlin::SkewMatrix(3), structural_error);
  }
  SECTION("laplace reference refuses large input") {
    REQUIRE_THROWS_AS(skewlin::pfaffian_laplace(skewlin::SkewMatrix(14)), size_error);
  }
  SECTION("structurally singular input gives zero") {
    skewlin::SkewMatrix m(4);
    m.set(2, 3, 1.0);  // rows 0,1 vanish
    REQUIRE(skewlin::pfaffian_elimination(m) == Complex(0.0, 0.0));
  }
}

TEST_CASE("pfaffian squared equals the determinant", "[skewlin]") {
  rng::Stream s(2024);
  for (int dim : {2, 6, 12, 20, 34}) {
    skewlin::SkewMatrix m = random_skew(dim, s);
    const Complex pf = skewlin::pfaffian_elimination(m);
    const Complex det = Eigen::PartialPivLU<Matrix>(m.entries()).determinant();
    const double denom = std::max(std::abs(det), std::abs(pf * pf));
    REQUIRE(std::abs(pf * pf - det) <= 1e-8 * denom);
  }
}

TEST_CASE("laplace and elimination agree on random 8x8", "[skewlin]") {
  rng::Stream s(31337);
  for (int trial = 0; trial < 10; ++trial) {
    skewlin::SkewMatrix m = random_skew(8, s);
    const Complex a = skewlin::pfaffian_elimination(m);
    const Complex b = skewlin::pfaffian_laplace(m);
    REQUIRE(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(b)));
  }
}

TEST_CASE("pfaffian row/column operation identities", "[skewlin]") {
  rng::Stream s(99);
  for (int trial = 0; trial < 25; ++trial) {
    const int dim = 2 + 2 * static_cast<int>(s.below(5));
    skewlin::SkewMatrix m = random_skew(dim, s);
    const Complex pf = skewlin::pfaffian_elimination(m);
    const double tol = 1e-9 * std::max(1.0, std::abs(pf));

    SECTION("scaling row+column j scales pf by lambda (trial " + std::to_string(trial) + ")") {
      const Complex lambda(s.gaussian(), s.gaussian());
      const int j = static_cast<int>(s.below(dim));
      Matrix t = m.entries();
      t.row(j) *= lambda;
      t.col(j) *= lambda;
      const Complex got = skewlin::pfaffian_elimination(skewlin::SkewMatrix::from_upper(t));
      REQUIRE(std::abs(got - lambda * pf) <= std::abs(lambda) * tol + 1e-12);
    }
    SECTION("swapping two rows+columns flips the sign (trial " + std::to_string(trial) + ")") {
      const int j = static_cast<int>(s.below(dim));
      int k = static_cast<int>(s.below(dim));
      if (k == j) k = (j + 1) % dim;
      Matrix t = m.entries();
      t.row(j).swap(t.row(k));
      t.col(j).swap(t.col(k));
      const Complex got = skewlin::pfaffian_elimination(skewlin::SkewMatrix::from_upper(t));
      REQUIRE(std::abs(got + pf) <= tol);
    }
    SECTION("adding a multiple of row/col j to row/col k is neutral (trial " +
            std::to_string(trial) + ")") {
      const Complex c(s.gaussian(), s.gaussian());
      const int j = static_cast<int>(s.below(dim));
      int k = static_cast<int>(s.below(dim));
      if (k == j) k = (j + 1) % dim;
      Matrix t = m.entries();
      t.row(k) += c * t.row(j);
      t.col(k) += c * t.col(j);
      const Complex got = skewlin::pfaffian_elimination(skewlin::SkewMatrix::from_upper(t));
      REQUIRE(std::abs(got - pf) <= (1.0 + std::abs(c)) * tol);
    }
  }
}

TEST_CASE("skew_canonical", "[skewlin]") {
  SECTION("already canonical input") {
    Eigen::VectorXd l(2);
    l << 1.0, 2.0;
    const Eigen::MatrixXd k = skewlin::canonical_blocks(l);
    const auto c = skewlin::skew_canonical(k);
    REQUIRE(c.lambdas[0] == Catch::Approx(1.0));
    REQUIRE(c.lambdas[1] == Catch::Approx(2.0));
    REQUIRE((c.O * c.O.transpose() - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <
            1e-10);
    REQUIRE((c.O * k * c.O.transpose() - skewlin::canonical_blocks(c.lambdas))
                .cwiseAbs()
                .maxCoeff() < 1e-10);
    REQUIRE((c.det_o == 1 || c.det_o == -1));
  }
  SECTION("zero matrix") {
    const auto c = skewlin::skew_canonical(Eigen::MatrixXd::Zero(6, 6));
    REQUIRE(c.lambdas.cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((c.O * c.O.transpose() - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() <
            1e-10);
  }
  SECTION("single 2x2 block") {
    Eigen::MatrixXd k(2, 2);
    k << 0.0, -0.9, 0.9, 0.0;
    const auto c = skewlin::skew_canonical(k);
    REQUIRE(c.lambdas[0] == Catch::Approx(0.9));
  }
  SECTION("random round trip O^T Lambda O = K") {
    rng::Stream s(404);
    for (int trial = 0; trial < 6; ++trial) {
      const int dim = 2 + 2 * static_cast<int>(s.below(6));
      const Eigen::MatrixXd k = random_real_skew(dim, s);
      const auto c = skewlin::skew_canonical(k);
      const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
      REQUIRE((c.O * c.O.transpose() - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff() <
              1e-10);
      const Eigen::MatrixXd lam = skewlin::canonical_blocks(c.lambdas);
      REQUIRE((c.O * k * c.O.transpose() - lam).cwiseAbs().maxCoeff() < 1e-10 * scale);
      REQUIRE((c.O.transpose() * lam * c.O - k).cwiseAbs().maxCoeff() < 1e-10 * scale);
      REQUIRE(c.lambdas.minCoeff() >= 0.0);
      // det sign against an independent determinant
      const double d = c.O.determinant();
      REQUIRE(c.det_o == (d < 0 ? -1 : 1));
    }
  }
  SECTION("degenerate mode energies still reconstruct") {
    Eigen::VectorXd l(3);
    l << 1.5, 1.5, 1.5;
    Eigen::MatrixXd k = skewlin::canonical_blocks(l);
    // rotate into a non-trivial basis with a random orthogonal matrix
    rng::Stream s(7);
    Eigen::MatrixXd g(6, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) g(i, j) = s.gaussian();
    const Eigen::MatrixXd r = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
    k = r * k * r.transpose();
    const auto c = skewlin::skew_canonical(k);
    for (int j = 0; j < 3; ++j) REQUIRE(c.lambdas[j] == Catch::Approx(1.5).margin(1e-9));
    REQUIRE((c.O * k * c.O.transpose() - skewlin::canonical_blocks(c.lambdas))
                .cwiseAbs()
                .maxCoeff() < 1e-9);
  }
  SECTION("kernel plus nonzero modes") {
    Eigen::VectorXd l(3);
    l << 0.0, 0.0, 2.0;
    const Eigen::MatrixXd k = skewlin::canonical_blocks(l);
    const auto c = skewlin::skew_canonical(k);
    REQUIRE(c.lambdas[0] == 0.0);
    REQUIRE(c.lambdas[1] == 0.0);
    REQUIRE(c.lambdas[2] == Catch::Approx(2.0));
    REQUIRE((c.O * k * c.O.transpose() - skewlin::canonical_blocks(c.lambdas))
                .cwiseAbs()
                .maxCoeff() < 1e-10);
  }
}
