#include "leaklab/linalg.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace leaklab {

Matrix gaussian_matrix(RngState& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  // row-major fill so the draw order matches the serialized layout
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

Matrix least_squares_min_norm(const Matrix& X, const Matrix& Z, double rank_tol) {
  if (X.rows() != Z.rows())
    throw ShapeMismatch("least_squares_min_norm: row counts differ");
  Eigen::BDCSVD<Matrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success)
    throw NumericalFailure("least_squares_min_norm: SVD did not converge");
  svd.setThreshold(rank_tol);
  Matrix W = svd.solve(Z);
  if (!W.allFinite())
    throw NumericalFailure("least_squares_min_norm: non-finite solution");
  return W;
}

Vector finite_diff_gradient(const std::function<double(const Vector&)>& f,
                            const Vector& theta, double h) {
  Vector g(theta.size());
  Vector t = theta;
  for (Index i = 0; i < theta.size(); ++i) {
    t(i) = theta(i) + h;
    double fp = f(t);
    t(i) = theta(i) - h;
    double fm = f(t);
    t(i) = theta(i);
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw NumericalFailure("finite_diff_gradient: f returned non-finite value");
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace leaklab
