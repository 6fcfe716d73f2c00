#pragma once

#include <Eigen/Dense>

#include "oslfmvc/rng.hpp"

namespace oslfmvc {

// argmax over column-orthonormal X of <X, A>_F, i.e. the orthonormal polar
// factor U V^T from a thin SVD of A. Works for square and tall A; the
// result always has exactly orthonormal columns, including when A is
// rank-deficient (the SVD basis completion is deterministic).
Eigen::MatrixXd orthonormal_polar_factor(const Eigen::MatrixXd& a);

// Thin QR orthonormalization with the sign of each column fixed so the
// corresponding diagonal of R is nonnegative; deterministic for a given
// input.
Eigen::MatrixXd qr_orthonormalize(const Eigen::MatrixXd& a);

Eigen::MatrixXd random_uniform_matrix(int rows, int cols, double lo, double hi,
                                      Rng& rng);
Eigen::MatrixXd random_normal_matrix(int rows, int cols, Rng& rng);

// Haar-like random orthogonal matrix (QR of a Gaussian matrix, sign-fixed).
Eigen::MatrixXd random_orthogonal(int dim, Rng& rng);

// k x n matrix with orthonormal rows, k <= n.
Eigen::MatrixXd random_row_orthonormal(int k, int n, Rng& rng);

inline double max_abs(const Eigen::MatrixXd& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

// ||A^T A - I||_max, the column-orthonormality defect
inline double orthonormality_defect(const Eigen::MatrixXd& a) {
  const Eigen::MatrixXd gram = a.transpose() * a;
  return max_abs(gram - Eigen::MatrixXd::Identity(a.cols(), a.cols()));
}

}  // namespace oslfmvc
