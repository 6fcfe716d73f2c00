#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "oslfmvc/kernels.hpp"
#include "oslfmvc/result.hpp"

namespace oslfmvc {

struct Hyperparams {
  int partition_dim = 0;   // k: rows of each base partition
  int subspace_dim = 0;    // m: compressed-subspace scale
  int num_clusters = 0;    // mu
  int max_iters = 200;
  double tol = 1e-3;       // stop when (obj_t - obj_{t-1})^2 < tol
  bool relative_stop = false;
  double rel_tol = 1e-6;   // alternative rule: |delta| / |obj| < rel_tol
  std::uint64_t seed = 0;
  bool beta_simplex = true;  // constrain view weights to the simplex
  bool strict_s = false;     // clamp reconstruction columns nonnegative

  // throws std::invalid_argument unless mu <= k, mu <= m <= n, tol > 0
  void validate(int n, int p) const;
};

// Live variables of the fusion optimization. Shapes for p views over n
// samples: rotations[i] k x k orthogonal, view_weights on the simplex,
// compression n x m column-orthonormal, reconstruction m x n with unit-norm
// columns, centroids k x mu column-orthonormal, label_matrix mu x n with
// one-hot columns, consensus k x n equal to sum_i beta_i W_i H_i.
struct FusionState {
  std::vector<Eigen::MatrixXd> rotations;
  Eigen::VectorXd view_weights;
  Eigen::MatrixXd compression;
  Eigen::MatrixXd reconstruction;
  Eigen::MatrixXd centroids;
  Eigen::MatrixXd label_matrix;
  Eigen::MatrixXd consensus;
  std::vector<double> objective_trace;
  bool beta_simplex = true;
  bool strict_nonneg = false;

  int n() const { return static_cast<int>(consensus.cols()); }
  int k() const { return static_cast<int>(consensus.rows()); }
  int m() const { return static_cast<int>(compression.cols()); }
  int mu() const { return static_cast<int>(label_matrix.rows()); }
  int p() const { return static_cast<int>(rotations.size()); }

  // cluster index of each sample, the argmax row per label column
  Eigen::VectorXi labels() const;
  int nonempty_clusters() const;
};

// Deterministic seeded initialization: compression = orthonormalized random
// matrix, reconstruction = random nonnegative with unit columns, uniform
// weights, identity rotations, centroids = leading identity columns, random
// one-hot labels with every cluster nonempty.
FusionState init_state(const PartitionSet& partitions, const Hyperparams& hp);

// tr(H (H P S)^T) + tr(Y^T C^T H), evaluated as a sum of two traces.
double objective(const FusionState& state);

// One alternating-maximization step each. All of them leave the state
// feasible; update_rotation recomputes the consensus so later views in the
// same sweep see the refreshed value.
void update_rotation(FusionState& state, const PartitionSet& partitions,
                     int view);
void update_weights(FusionState& state, const PartitionSet& partitions);
void update_compression(FusionState& state);
void update_reconstruction(FusionState& state);
void update_centroids(FusionState& state);
void update_labels(FusionState& state);

void recompute_consensus(FusionState& state, const PartitionSet& partitions);

// Constraint checks at the documented tolerances; returns one message per
// violated invariant (empty means the state is feasible).
std::vector<std::string> invariant_violations(const FusionState& state,
                                              const PartitionSet& partitions);

using IterationObserver =
    std::function<void(const FusionState& state, int iteration)>;

// Full run: per iteration a rotation sweep over all views, then weights,
// compression, reconstruction, centroids, labels; appends the objective and
// stops on the squared-difference rule or max_iters. Reaching max_iters is
// reported in the result, not an error.
ClusteringResult run(const PartitionSet& partitions, const Hyperparams& hp,
                     const IterationObserver& observer = {});

}  // namespace oslfmvc
