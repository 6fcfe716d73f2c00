#include "oslfmvc/linalg.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

namespace oslfmvc {

Eigen::MatrixXd orthonormal_polar_factor(const Eigen::MatrixXd& a) {
  // Jacobi is exact enough for the small square factors; BDC scales to the
  // tall-and-skinny case.
  if (a.rows() <= 64 && a.cols() <= 64) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU |
                                                 Eigen::ComputeThinV);
    return svd.matrixU() * svd.matrixV().transpose();
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().transpose();
}

Eigen::MatrixXd qr_orthonormalize(const Eigen::MatrixXd& a) {
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q =
      qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
  const Eigen::MatrixXd& qr_packed = qr.matrixQR();
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (qr_packed(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

Eigen::MatrixXd random_uniform_matrix(int rows, int cols, double lo, double hi,
                                      Rng& rng) {
  Eigen::MatrixXd out(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) out(i, j) = rng.uniform(lo, hi);
  return out;
}

Eigen::MatrixXd random_normal_matrix(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd out(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) out(i, j) = rng.normal();
  return out;
}

Eigen::MatrixXd random_orthogonal(int dim, Rng& rng) {
  return qr_orthonormalize(random_normal_matrix(dim, dim, rng));
}

Eigen::MatrixXd random_row_orthonormal(int k, int n, Rng& rng) {
  return qr_orthonormalize(random_normal_matrix(n, k, rng)).transpose();
}

}  // namespace oslfmvc
