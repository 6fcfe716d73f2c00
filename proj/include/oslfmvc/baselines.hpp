#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "oslfmvc/kernels.hpp"

namespace oslfmvc {

// Seeded Lloyd k-means on row vectors with k-means++ style seeding,
// `restarts` independent starts, best within-cluster sum of squares kept.
// Deterministic for a fixed seed.
Eigen::VectorXi lloyd_kmeans(const Eigen::MatrixXd& points, int mu,
                             std::uint64_t seed, int restarts = 10);
double kmeans_wcss(const Eigen::MatrixXd& points,
                   const Eigen::VectorXi& labels, int mu);

// Spectral relaxation of kernel k-means: top-mu eigenvectors of K, rows of
// the n x mu embedding length-normalized, then Lloyd. Zero embedding rows
// (rank-deficient K) land deterministically in cluster 0.
Eigen::VectorXi kernel_kmeans(const Eigen::MatrixXd& kernel, int mu,
                              std::uint64_t seed);

// kernel_kmeans on the uniform average of the base kernels.
Eigen::VectorXi avg_kkm(const KernelSet& kernels, int mu, std::uint64_t seed);

// Oracle baseline: kernel_kmeans per view, keep the view with the highest
// accuracy against the supplied ground truth.
struct SingleBestResult {
  Eigen::VectorXi labels;
  int view = 0;
  double acc = 0.0;
};
SingleBestResult sb_kkm(const KernelSet& kernels, int mu,
                        const Eigen::VectorXi& truth, std::uint64_t seed);

// Alternating multiple kernel k-means on K_beta = sum_i beta_i^2 K_i:
// (a) partition = top-mu eigenvectors of K_beta, (b) closed-form simplex
// weights beta_i proportional to 1/tr(K_i (I - H^T H)). The recorded
// objective tr(K_beta (I - H^T H)) is non-increasing.
struct MkkmResult {
  Eigen::VectorXi labels;
  Eigen::VectorXd beta;
  std::vector<double> objective_trace;
};
MkkmResult mkkm(const KernelSet& kernels, int mu, std::uint64_t seed,
                int max_iters = 50);

}  // namespace oslfmvc
