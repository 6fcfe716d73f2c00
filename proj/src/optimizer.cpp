#include "oslfmvc/optimizer.hpp"

#include <Eigen/SVD>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "oslfmvc/linalg.hpp"
#include "oslfmvc/nnqp.hpp"
#include "oslfmvc/rng.hpp"

namespace oslfmvc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

void Hyperparams::validate(int n, int p) const {
  if (p < 1) throw std::invalid_argument("no views");
  if (num_clusters < 1) throw std::invalid_argument("mu must be positive");
  if (partition_dim < num_clusters)
    throw std::invalid_argument("require mu <= k");
  if (subspace_dim < num_clusters)
    throw std::invalid_argument("require mu <= m");
  if (subspace_dim > n) throw std::invalid_argument("require m <= n");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be positive");
}

Eigen::VectorXi FusionState::labels() const {
  Eigen::VectorXi out(n());
  for (int j = 0; j < n(); ++j) {
    Eigen::Index row = 0;
    label_matrix.col(j).maxCoeff(&row);
    out[j] = static_cast<int>(row);
  }
  return out;
}

int FusionState::nonempty_clusters() const {
  int count = 0;
  for (int c = 0; c < mu(); ++c)
    if (label_matrix.row(c).sum() > 0.0) ++count;
  return count;
}

void recompute_consensus(FusionState& state, const PartitionSet& partitions) {
  state.consensus.setZero();
  for (int i = 0; i < state.p(); ++i) {
    state.consensus.noalias() += state.view_weights[i] *
                                 (state.rotations[i] *
                                  partitions.partitions[i]);
  }
}

FusionState init_state(const PartitionSet& partitions, const Hyperparams& hp) {
  hp.validate(partitions.n(), partitions.p());
  const int n = partitions.n();
  const int k = partitions.k();
  const int m = hp.subspace_dim;
  const int mu = hp.num_clusters;
  const int p = partitions.p();
  if (hp.partition_dim != k)
    throw std::invalid_argument("partition dimension mismatch");

  Rng rng(hp.seed);
  FusionState state;
  state.beta_simplex = hp.beta_simplex;
  state.strict_nonneg = hp.strict_s;

  state.compression =
      qr_orthonormalize(random_uniform_matrix(n, m, -1.0, 1.0, rng));

  state.reconstruction = random_uniform_matrix(m, n, 0.0, 1.0, rng);
  for (int j = 0; j < n; ++j) {
    const double norm = state.reconstruction.col(j).norm();
    if (norm < 1e-14) {
      state.reconstruction.col(j).setConstant(1.0 / std::sqrt(double(m)));
    } else {
      state.reconstruction.col(j) /= norm;
    }
  }

  state.view_weights = Eigen::VectorXd::Constant(p, 1.0 / p);
  state.rotations.assign(p, Eigen::MatrixXd::Identity(k, k));
  state.centroids = Eigen::MatrixXd::Identity(k, mu);

  // random one-hot columns, then make every cluster nonempty by moving one
  // sample out of the currently largest cluster
  std::vector<int> assign(n);
  std::vector<int> counts(mu, 0);
  for (int j = 0; j < n; ++j) {
    assign[j] = static_cast<int>(rng.below(mu));
    ++counts[assign[j]];
  }
  for (int c = 0; c < mu; ++c) {
    if (counts[c] > 0) continue;
    int donor = 0;
    for (int d = 1; d < mu; ++d)
      if (counts[d] > counts[donor]) donor = d;
    for (int j = 0; j < n; ++j) {
      if (assign[j] == donor) {
        assign[j] = c;
        --counts[donor];
        ++counts[c];
        break;
      }
    }
  }
  state.label_matrix = Eigen::MatrixXd::Zero(mu, n);
  for (int j = 0; j < n; ++j) state.label_matrix(assign[j], j) = 1.0;

  state.consensus = Eigen::MatrixXd::Zero(k, n);
  recompute_consensus(state, partitions);
  state.objective_trace.push_back(objective(state));
  return state;
}

double objective(const FusionState& state) {
  // tr(H S^T P^T H^T) = <H S^T, H P>_F, both factors k x m
  const Eigen::MatrixXd hs = state.consensus * state.reconstruction.transpose();
  const Eigen::MatrixXd hp = state.consensus * state.compression;
  const double fusion_term = hs.cwiseProduct(hp).sum();
  // tr(Y^T C^T H) = <C, H Y^T>_F
  const Eigen::MatrixXd hy = state.consensus * state.label_matrix.transpose();
  const double label_term = state.centroids.cwiseProduct(hy).sum();
  return fusion_term + label_term;
}

void update_rotation(FusionState& state, const PartitionSet& partitions,
                     int view) {
  const Eigen::MatrixXd& base = partitions.partitions[view];
  const double weight = state.view_weights[view];

  // contribution of the other views only
  const Eigen::MatrixXd rest =
      state.consensus - weight * (state.rotations[view] * base);

  const Eigen::MatrixXd rest_s = rest * state.reconstruction.transpose();
  const Eigen::MatrixXd base_p = base * state.compression;
  Eigen::MatrixXd coeff = weight * (rest_s * base_p.transpose());
  coeff.noalias() +=
      weight * state.centroids *
      (state.label_matrix * base.transpose());
  if (!coeff.allFinite())
    throw std::runtime_error("non-finite rotation coefficient");

  state.rotations[view] = orthonormal_polar_factor(coeff);
  recompute_consensus(state, partitions);
}

void update_weights(FusionState& state, const PartitionSet& partitions) {
  const int p = state.p();

  std::vector<Eigen::MatrixXd> rotated(p);
  std::vector<Eigen::MatrixXd> against_s(p);
  std::vector<Eigen::MatrixXd> against_p(p);
  for (int i = 0; i < p; ++i) {
    rotated[i] = state.rotations[i] * partitions.partitions[i];
    against_s[i] = rotated[i] * state.reconstruction.transpose();
    against_p[i] = rotated[i] * state.compression;
  }

  Eigen::MatrixXd quad(p, p);
  Eigen::VectorXd lin(p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j)
      quad(i, j) = -against_s[i].cwiseProduct(against_p[j]).sum();
    const Eigen::MatrixXd scores =
        rotated[i] * state.label_matrix.transpose();
    lin[i] = -state.centroids.cwiseProduct(scores).sum();
  }

  const QpProblem problem(std::move(quad), std::move(lin), state.beta_simplex);
  state.view_weights = solve_qp(problem, state.view_weights);
  recompute_consensus(state, partitions);
}

void update_compression(FusionState& state) {
  // coefficient H^T (H S^T), an n x m matrix of rank <= k
  const Eigen::MatrixXd coeff =
      state.consensus.transpose() *
      (state.consensus * state.reconstruction.transpose());
  state.compression = orthonormal_polar_factor(coeff);
}

void update_reconstruction(FusionState& state) {
  const int m = state.m();
  const int n = state.n();
  // row i of H^T (H P) scores sample i against the anchors
  const Eigen::MatrixXd scores =
      state.consensus.transpose() * (state.consensus * state.compression);
  const double uniform = 1.0 / std::sqrt(static_cast<double>(m));
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd q = scores.row(j).transpose();
    if (state.strict_nonneg) q = q.cwiseMax(0.0);
    const double norm = q.norm();
    if (norm < 1e-14) {
      state.reconstruction.col(j).setConstant(uniform);
    } else {
      state.reconstruction.col(j) = q / norm;
    }
  }
}

void update_centroids(FusionState& state) {
  const Eigen::MatrixXd target =
      state.consensus * state.label_matrix.transpose();
  state.centroids = orthonormal_polar_factor(target);
}

void update_labels(FusionState& state) {
  const Eigen::MatrixXd scores =
      state.centroids.transpose() * state.consensus;  // mu x n
  state.label_matrix.setZero();
  for (int j = 0; j < state.n(); ++j) {
    Eigen::Index row = 0;
    scores.col(j).maxCoeff(&row);  // ties resolve to the smallest row index
    state.label_matrix(row, j) = 1.0;
  }
}

std::vector<std::string> invariant_violations(const FusionState& state,
                                              const PartitionSet& partitions) {
  std::vector<std::string> out;
  auto flunk = [&out](const std::string& msg) { out.push_back(msg); };

  for (int i = 0; i < state.p(); ++i) {
    if (orthonormality_defect(state.rotations[i]) >= 1e-8)
      flunk("rotation " + std::to_string(i) + " not orthogonal");
  }
  if (orthonormality_defect(state.compression) >= 1e-8)
    flunk("compression not column-orthonormal");
  if (orthonormality_defect(state.centroids) >= 1e-8)
    flunk("centroids not column-orthonormal");

  for (int j = 0; j < state.n(); ++j) {
    if (std::abs(state.reconstruction.col(j).norm() - 1.0) >= 1e-10) {
      flunk("reconstruction column " + std::to_string(j) + " not unit norm");
      break;
    }
  }

  for (int j = 0; j < state.n(); ++j) {
    int ones = 0;
    bool binary = true;
    for (int c = 0; c < state.mu(); ++c) {
      const double v = state.label_matrix(c, j);
      if (v == 1.0)
        ++ones;
      else if (v != 0.0)
        binary = false;
    }
    if (!binary || ones != 1) {
      flunk("label column " + std::to_string(j) + " not one-hot");
      break;
    }
  }

  if (state.view_weights.minCoeff() < 0.0) flunk("negative view weight");
  if (state.beta_simplex &&
      std::abs(state.view_weights.sum() - 1.0) > 1e-12)
    flunk("view weights off the simplex");

  FusionState fresh = state;
  recompute_consensus(fresh, partitions);
  if (max_abs(fresh.consensus - state.consensus) >= 1e-12)
    flunk("consensus out of sync with weighted rotated partitions");

  return out;
}

ClusteringResult run(const PartitionSet& partitions, const Hyperparams& hp,
                     const IterationObserver& observer) {
  const auto start = Clock::now();
  FusionState state = init_state(partitions, hp);

  ClusteringResult result;
  result.seed = hp.seed;

  const auto loop_start = Clock::now();
  int iterations = 0;
  bool converged = false;
  for (int t = 1; t <= hp.max_iters; ++t) {
    const double before_sweep = state.objective_trace.back();

    for (int view = 0; view < partitions.p(); ++view)
      update_rotation(state, partitions, view);
    const double after_sweep = objective(state);
    if (after_sweep < before_sweep - 1e-6 * std::abs(before_sweep)) {
      ++result.w_step_violations;
      std::fprintf(stderr,
                   "warning: rotation sweep decreased the objective at "
                   "iteration %d (%.12g -> %.12g)\n",
                   t, before_sweep, after_sweep);
    }

    update_weights(state, partitions);
    update_compression(state);
    update_reconstruction(state);
    update_centroids(state);
    update_labels(state);

    const double obj = objective(state);
    state.objective_trace.push_back(obj);
    iterations = t;
    if (observer) observer(state, t);

    const double delta = obj - state.objective_trace[state.objective_trace.size() - 2];
    if (hp.relative_stop) {
      if (std::abs(delta) / std::max(std::abs(obj), 1e-300) < hp.rel_tol) {
        converged = true;
        break;
      }
    } else if (delta * delta < hp.tol) {
      converged = true;
      break;
    }
  }
  result.loop_seconds = seconds_since(loop_start);

  result.labels = state.labels();
  result.objective_trace = state.objective_trace;
  result.iterations = iterations;
  result.converged = converged;
  result.nonempty_clusters = state.nonempty_clusters();
  result.seconds = seconds_since(start);
  return result;
}

}  // namespace oslfmvc
