#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "semtype/error.hpp"
#include "semtype/linalg.hpp"
#include "semtype/rng.hpp"

using namespace semtype;

namespace {

Eigen::MatrixXd random_symmetric(int n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double v = rng.normal();
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  return a;
}

}  // namespace

TEST_CASE("jacobi eigensolver basics") {
  SUBCASE("identity") {
    const EigenDecomposition eig = jacobi_eigen(SymMatrix(Eigen::MatrixXd::Identity(4, 4)));
    for (int i = 0; i < 4; ++i) CHECK(eig.values[i] == doctest::Approx(1.0));
  }
  SUBCASE("2x2 with known pairs") {
    Eigen::MatrixXd a(2, 2);
    a << 2, 1, 1, 2;
    const EigenDecomposition eig = jacobi_eigen(SymMatrix(a));
    CHECK(eig.values[0] == doctest::Approx(3.0));
    CHECK(eig.values[1] == doctest::Approx(1.0));
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(eig.vectors(0, 0) == doctest::Approx(r));
    CHECK(eig.vectors(1, 0) == doctest::Approx(r));
    // Sign convention: the first largest-magnitude component is positive.
    CHECK(eig.vectors(0, 1) == doctest::Approx(r));
    CHECK(eig.vectors(1, 1) == doctest::Approx(-r));
  }
  SUBCASE("order 1") {
    Eigen::MatrixXd a(1, 1);
    a << -7.0;
    const EigenDecomposition eig = jacobi_eigen(SymMatrix(a));
    CHECK(eig.values[0] == doctest::Approx(-7.0));
    CHECK(std::abs(eig.vectors(0, 0)) == doctest::Approx(1.0));
  }
  SUBCASE("zero matrix converges immediately") {
    const EigenDecomposition eig = jacobi_eigen(SymMatrix(Eigen::MatrixXd::Zero(3, 3)));
    CHECK(eig.values.norm() == 0.0);
  }
  SUBCASE("exhausted budget raises NoConvergence") {
    const Eigen::MatrixXd a = random_symmetric(8, 3);
    try {
      jacobi_eigen(SymMatrix(a), 1e-10, 0);
      FAIL("expected NoConvergence");
    } catch (const Error& e) {
      CHECK(e.code() == Err::NoConvergence);
    }
  }
}

TEST_CASE("jacobi eigensolver on random symmetric matrices") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int n = 50;
    const Eigen::MatrixXd a = random_symmetric(n, seed);
    const double norm_f = a.norm();
    const EigenDecomposition eig = jacobi_eigen(SymMatrix(a));

    SUBCASE("residuals, trace and orthonormality") {}
    for (int k = 0; k < n; ++k) {
      const double residual = (a * eig.vectors.col(k) - eig.values[k] * eig.vectors.col(k)).norm();
      REQUIRE(residual <= 1e-8 * norm_f);
    }
    REQUIRE(std::abs(eig.values.sum() - a.trace()) <= 1e-8 * std::abs(a.trace()) + 1e-10);
    const Eigen::MatrixXd gram = eig.vectors.transpose() * eig.vectors;
    REQUIRE((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-8);
    for (int k = 0; k + 1 < n; ++k) REQUIRE(eig.values[k] >= eig.values[k + 1]);

    // Shift property: eigenvalues of A + cI are shifted by c.
    const double c = 3.25;
    const EigenDecomposition shifted =
        jacobi_eigen(SymMatrix(a + c * Eigen::MatrixXd::Identity(n, n)));
    for (int k = 0; k < n; ++k) {
      REQUIRE(std::abs(shifted.values[k] - (eig.values[k] + c)) <= 1e-8 * (norm_f + c));
    }
  }
}

TEST_CASE("symmetrization on construction") {
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 2.0, 4.0, 1.0;
  const SymMatrix sym(a);
  CHECK(sym.data()(0, 1) == doctest::Approx(3.0));
  CHECK(sym.data()(0, 1) == sym.data()(1, 0));
  CHECK_THROWS_AS(SymMatrix(Eigen::MatrixXd::Zero(2, 3)), Error);
}
