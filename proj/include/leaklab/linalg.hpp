#pragma once

#include <functional>

#include "leaklab/rng.hpp"
#include "leaklab/types.hpp"

namespace leaklab {

// rows x cols matrix with i.i.d. standard normal entries
Matrix gaussian_matrix(RngState& rng, Index rows, Index cols);

// Minimum-Frobenius-norm minimizer W of ||X W - Z||_F^2 via thin SVD.
// Singular values below rank_tol * sigma_max are treated as zero.
Matrix least_squares_min_norm(const Matrix& X, const Matrix& Z, double rank_tol = 1e-10);

// Central differences (f(theta + h e_i) - f(theta - h e_i)) / (2h).
Vector finite_diff_gradient(const std::function<double(const Vector&)>& f,
                            const Vector& theta, double h);

}  // namespace leaklab
