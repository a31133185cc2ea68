#include <doctest.h>

#include <Eigen/SVD>

#include "leaklab/linalg.hpp"

using namespace leaklab;

TEST_CASE("overdetermined solve matches the normal-equations oracle") {
  // X = [[1,0],[0,1],[1,1]], z = [1,2,3]; (X^T X) w = X^T z gives w = [1,2]
  Matrix X(3, 2);
  X << 1, 0, 0, 1, 1, 1;
  Matrix z(3, 1);
  z << 1, 2, 3;
  Matrix w = least_squares_min_norm(X, z);
  CHECK(w(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w(1, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK((X * w - z).norm() == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("underdetermined solve returns the minimum-norm solution") {
  // X = [[1,1]], z = [2]; w = X^T (X X^T)^-1 z = [1,1]
  Matrix X(1, 2);
  X << 1, 1;
  Matrix z(1, 1);
  z << 2;
  Matrix w = least_squares_min_norm(X, z);
  CHECK(w(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("identity design returns the targets") {
  RngState rng(3);
  Matrix Z = gaussian_matrix(rng, 4, 3);
  Matrix W = least_squares_min_norm(Matrix::Identity(4, 4), Z);
  CHECK((W - Z).norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("full-column-rank recovery: XW reproduces XW0") {
  RngState rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix X = gaussian_matrix(rng, 30, 10);
    Matrix W0 = gaussian_matrix(rng, 10, 4);
    Matrix Z = X * W0;
    Matrix W = least_squares_min_norm(X, Z);
    CHECK((X * W - Z).norm() / Z.norm() <= 1e-10);
  }
}

TEST_CASE("n < d: solution is orthogonal to the null space of X") {
  RngState rng(21);
  Matrix X = gaussian_matrix(rng, 3, 8);
  Matrix Z = gaussian_matrix(rng, 3, 2);
  Matrix W = least_squares_min_norm(X, Z);
  CHECK((X * W - Z).norm() <= 1e-10);

  Eigen::JacobiSVD<Matrix> svd(X, Eigen::ComputeFullV);
  Matrix null_basis = svd.matrixV().rightCols(8 - 3);
  CHECK((null_basis.transpose() * W).norm() <= 1e-10);

  // any exact solution built by adding a null-space component is longer
  RngState nr(22);
  for (int t = 0; t < 3; ++t) {
    Matrix bump = null_basis * gaussian_matrix(nr, 8 - 3, 2);
    CHECK(W.norm() <= (W + bump).norm() + 1e-12);
  }
}

TEST_CASE("minimum-norm solution lies in the row space for a single sample") {
  Matrix X(1, 2);
  X << 3, 4;
  Matrix z(1, 1);
  z << 5;
  Matrix W = least_squares_min_norm(X, z);
  // rank <= 1: parallel to X^T
  CHECK(W(0, 0) * X(0, 1) == doctest::Approx(W(1, 0) * X(0, 0)).epsilon(1e-12));
}

TEST_CASE("finite differences on a quadratic are exact up to roundoff") {
  auto f = [](const Vector& t) { return t(0) * t(0); };
  Vector theta(1);
  theta << 3.0;
  Vector g = finite_diff_gradient(f, theta, 1e-5);
  CHECK(g(0) == doctest::Approx(6.0).epsilon(1e-6));
}

TEST_CASE("finite differences of a constant are zero") {
  auto f = [](const Vector&) { return 4.2; };
  Vector theta = Vector::Zero(5);
  Vector g = finite_diff_gradient(f, theta, 1e-5);
  CHECK(g.norm() == doctest::Approx(0.0));
}

TEST_CASE("finite differences reject non-finite f") {
  auto f = [](const Vector& t) { return std::log(t(0)); };
  Vector theta(1);
  theta << 0.0;  // f(theta - h) = log(negative) = NaN
  CHECK_THROWS_AS(finite_diff_gradient(f, theta, 1e-5), NumericalFailure);
}
