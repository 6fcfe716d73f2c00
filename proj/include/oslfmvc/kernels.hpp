#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace oslfmvc {

// p symmetric PSD Gram matrices over the same n samples.
struct KernelSet {
  std::vector<Eigen::MatrixXd> kernels;

  int p() const { return static_cast<int>(kernels.size()); }
  int n() const {
    return kernels.empty() ? 0 : static_cast<int>(kernels.front().rows());
  }
};

// p base partition matrices, each k x n with orthonormal rows.
struct PartitionSet {
  std::vector<Eigen::MatrixXd> partitions;

  int p() const { return static_cast<int>(partitions.size()); }
  int k() const {
    return partitions.empty() ? 0 : static_cast<int>(partitions.front().rows());
  }
  int n() const {
    return partitions.empty() ? 0 : static_cast<int>(partitions.front().cols());
  }
};

struct KernelKind {
  enum class Family { linear, gaussian, polynomial };
  Family family = Family::linear;
  double gamma = 1.0;  // gaussian: exp(-gamma * ||x_i - x_j||^2)
  int degree = 2;      // polynomial: (x_i . x_j + coef)^degree
  double coef = 0.0;

  static KernelKind linear() { return {}; }
  static KernelKind gaussian(double gamma);
  static KernelKind polynomial(int degree, double coef);
};

// Gram matrix of one view. The result is exactly symmetric and clamped to
// the PSD cone (negative eigenvalues raised to zero); for these kernel
// families the clamp only removes rounding-level negatives.
Eigen::MatrixXd build_kernel(const Eigen::MatrixXd& view,
                             const KernelKind& kind);

// K -> J K J with J = I - (1/n) 1 1^T; removes the constant component so
// row/column sums of the output are ~0.
Eigen::MatrixXd center_kernel(const Eigen::MatrixXd& kernel);

// Rows are the k leading unit eigenvectors of K (descending eigenvalue), so
// H H^T = I_k. Deterministic: each eigenvector's entry of largest magnitude
// is made nonnegative, and exact eigenvalue ties are ordered by
// lexicographic comparison of the sign-fixed eigenvectors.
Eigen::MatrixXd extract_partition(const Eigen::MatrixXd& kernel, int k);

// Equivalent to extract_partition(center_kernel(view * view^T), k) computed
// via a thin SVD of the (optionally centered) view, without forming the
// n x n Gram matrix. Requires k <= view.cols().
Eigen::MatrixXd extract_partition_linear(const Eigen::MatrixXd& view, int k,
                                         bool center);

// gamma = 1 / (2 median^2) of pairwise sample distances, estimated on at
// most 2000 seeded random pairs. Falls back to 1.0 when the median is zero.
double median_heuristic_gamma(const Eigen::MatrixXd& view, std::uint64_t seed);

}  // namespace oslfmvc
