#include "oslfmvc/optimizer.hpp"

#include <cmath>

#include "doctest.h"
#include "oslfmvc/baselines.hpp"
#include "oslfmvc/data_io.hpp"
#include "oslfmvc/linalg.hpp"
#include "oslfmvc/metrics.hpp"
#include "oslfmvc/rng.hpp"
#include "test_support.hpp"

using namespace oslfmvc;
using testsupport::random_instance;

namespace {

Hyperparams make_hp(int k, int m, int mu, std::uint64_t seed) {
  Hyperparams hp;
  hp.partition_dim = k;
  hp.subspace_dim = m;
  hp.num_clusters = mu;
  hp.seed = seed;
  return hp;
}

PartitionSet random_partitions(int k, int n, int p, std::uint64_t seed) {
  Rng rng(seed);
  PartitionSet out;
  for (int i = 0; i < p; ++i)
    out.partitions.push_back(random_row_orthonormal(k, n, rng));
  return out;
}

PartitionSet blob_partitions(const ViewSet& views, int k,
                             std::uint64_t seed) {
  PartitionSet out;
  for (int v = 0; v < views.p(); ++v) {
    const double gamma = median_heuristic_gamma(views.views[v], seed);
    const Eigen::MatrixXd kernel =
        build_kernel(views.views[v], KernelKind::gaussian(gamma));
    out.partitions.push_back(extract_partition(center_kernel(kernel), k));
  }
  return out;
}

}  // namespace

TEST_CASE("init satisfies every invariant and is deterministic") {
  const PartitionSet partitions = random_partitions(4, 25, 3, 100);
  const Hyperparams hp = make_hp(4, 5, 3, 9);

  const FusionState a = init_state(partitions, hp);
  CHECK(invariant_violations(a, partitions).empty());
  CHECK(orthonormality_defect(a.compression) < 1e-10);
  CHECK(a.objective_trace.size() == 1);

  // every cluster starts nonempty
  CHECK(a.nonempty_clusters() == 3);

  const FusionState b = init_state(partitions, hp);
  CHECK(max_abs(a.compression - b.compression) == 0.0);
  CHECK(max_abs(a.reconstruction - b.reconstruction) == 0.0);
  CHECK(max_abs(a.label_matrix - b.label_matrix) == 0.0);

  const Hyperparams other = make_hp(4, 5, 3, 10);
  const FusionState c = init_state(partitions, other);
  CHECK(max_abs(a.compression - c.compression) > 0.0);
}

TEST_CASE("hyperparameter validation") {
  const PartitionSet partitions = random_partitions(4, 10, 2, 5);
  CHECK_THROWS_AS(init_state(partitions, make_hp(4, 11, 3, 0)),
                  std::invalid_argument);  // m > n
  CHECK_THROWS_AS(init_state(partitions, make_hp(4, 5, 5, 0)),
                  std::invalid_argument);  // k < mu
  Hyperparams bad_tol = make_hp(4, 5, 3, 0);
  bad_tol.tol = 0.0;
  CHECK_THROWS_AS(init_state(partitions, bad_tol), std::invalid_argument);
}

TEST_CASE("objective matches the naive elementwise oracle") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto inst = random_instance(6, 3, 3, 2, 2, seed);
    const double fast = objective(inst.state);
    const double slow = testsupport::naive_objective(inst.state);
    CHECK(fast == doctest::Approx(slow).epsilon(1e-12));
  }
}

TEST_CASE("identity rotation coefficient keeps the identity") {
  // with G = I the polar factor is I
  CHECK(max_abs(orthonormal_polar_factor(Eigen::MatrixXd::Identity(3, 3)) -
                Eigen::MatrixXd::Identity(3, 3)) < 1e-12);
}

TEST_CASE("already-orthonormal coefficients are their own polar factor") {
  // leading identity columns, the trivial case for the compression and
  // centroid targets
  const Eigen::MatrixXd slice = Eigen::MatrixXd::Identity(6, 3);
  CHECK(max_abs(orthonormal_polar_factor(slice) - slice) < 1e-12);
}

TEST_CASE("polar factor of diag(2, -3)") {
  const Eigen::MatrixXd g = Eigen::Vector2d(2.0, -3.0).asDiagonal();
  const Eigen::MatrixXd w = orthonormal_polar_factor(g);
  Eigen::MatrixXd expected(2, 2);
  expected << 1, 0, 0, -1;
  CHECK(max_abs(w - expected) < 1e-12);
  CHECK((g.cwiseProduct(w)).sum() == doctest::Approx(5.0));

  Rng rng(21);
  const double achieved = (g.cwiseProduct(w)).sum();
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::MatrixXd rival = random_orthogonal(2, rng);
    CHECK((g.cwiseProduct(rival)).sum() <= achieved + 1e-9);
  }
}

TEST_CASE("rotation update beats random orthogonal rivals") {
  auto inst = random_instance(15, 4, 4, 3, 3, 77);
  FusionState& s = inst.state;

  // coefficient recomputed independently after the update for view 0
  update_rotation(s, inst.partitions, 0);
  const Eigen::MatrixXd& base = inst.partitions.partitions[0];
  const Eigen::MatrixXd rest =
      s.consensus - s.view_weights[0] * (s.rotations[0] * base);
  const Eigen::MatrixXd coeff =
      s.view_weights[0] *
          (rest * s.reconstruction.transpose() * s.compression.transpose() *
           base.transpose()) +
      s.view_weights[0] * s.centroids * s.label_matrix * base.transpose();

  const double achieved = coeff.cwiseProduct(s.rotations[0]).sum();
  Rng rng(31);
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::MatrixXd rival = random_orthogonal(4, rng);
    CHECK(coeff.cwiseProduct(rival).sum() <= achieved + 1e-9);
  }
  CHECK(invariant_violations(s, inst.partitions).empty());
}

TEST_CASE("weights: single view stays pinned at one") {
  auto inst = random_instance(12, 3, 3, 2, 1, 5);
  update_weights(inst.state, inst.partitions);
  CHECK(inst.state.view_weights[0] == 1.0);
}

TEST_CASE("weights: identical views split evenly") {
  Rng rng(8);
  PartitionSet partitions;
  const Eigen::MatrixXd shared = random_row_orthonormal(3, 14, rng);
  partitions.partitions = {shared, shared};

  const Hyperparams hp = make_hp(3, 4, 2, 3);
  FusionState s = init_state(partitions, hp);
  const double before = objective(s);
  update_weights(s, partitions);
  CHECK(std::abs(s.view_weights[0] - s.view_weights[1]) < 1e-6);
  CHECK(objective(s) >= before - 1e-12);
  CHECK(std::abs(s.view_weights.sum() - 1.0) <= 1e-12);
}

TEST_CASE("sub-step monotonicity on random states") {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    auto inst = random_instance(20, 4, 4, 3, 3, seed);

    auto run_step = [&](auto&& step) {
      FusionState s = inst.state;
      const double before = objective(s);
      step(s);
      const double after = objective(s);
      CHECK(after >= before - 1e-9 * std::abs(before));
      CHECK(invariant_violations(s, inst.partitions).empty());
      ++checked;
    };
    run_step([&](FusionState& s) { update_weights(s, inst.partitions); });
    run_step([&](FusionState& s) { update_compression(s); });
    run_step([&](FusionState& s) { update_reconstruction(s); });
    run_step([&](FusionState& s) { update_centroids(s); });
    run_step([&](FusionState& s) { update_labels(s); });
  }
  CHECK(checked == 125);
}

TEST_CASE("reconstruction columns solve the per-column maximization") {
  auto inst = random_instance(18, 4, 5, 3, 2, 33);
  FusionState& s = inst.state;
  update_reconstruction(s);
  const Eigen::MatrixXd scores =
      s.consensus.transpose() * (s.consensus * s.compression);
  for (int j = 0; j < s.n(); ++j) {
    const Eigen::VectorXd q = scores.row(j).transpose();
    const double attained = q.dot(s.reconstruction.col(j));
    // Cauchy-Schwarz equality: the unit maximizer reaches ||q||
    CHECK(attained == doctest::Approx(q.norm()).epsilon(1e-12));
  }
}

TEST_CASE("reconstruction handles zero rows with the uniform column") {
  auto inst = random_instance(10, 3, 4, 2, 2, 3);
  FusionState& s = inst.state;
  s.consensus.setZero();  // forces every score row to zero
  update_reconstruction(s);
  const double uniform = 1.0 / std::sqrt(4.0);
  for (int j = 0; j < s.n(); ++j)
    for (int i = 0; i < 4; ++i)
      CHECK(s.reconstruction(i, j) == doctest::Approx(uniform));
}

TEST_CASE("strict mode clamps negatives and renormalizes") {
  auto inst = random_instance(12, 3, 4, 2, 2, 9);
  FusionState& s = inst.state;
  s.strict_nonneg = true;
  update_reconstruction(s);
  CHECK(s.reconstruction.minCoeff() >= 0.0);
  for (int j = 0; j < s.n(); ++j)
    CHECK(s.reconstruction.col(j).norm() == doctest::Approx(1.0));
}

TEST_CASE("compression and centroid updates beat random rivals") {
  auto inst = random_instance(16, 4, 4, 3, 2, 55);
  FusionState& s = inst.state;

  update_compression(s);
  const Eigen::MatrixXd a =
      s.consensus.transpose() * (s.consensus * s.reconstruction.transpose());
  const double p_score = a.cwiseProduct(s.compression).sum();
  Rng rng(6);
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::MatrixXd rival =
        qr_orthonormalize(random_normal_matrix(16, 4, rng));
    CHECK(a.cwiseProduct(rival).sum() <= p_score + 1e-9);
  }

  update_centroids(s);
  const Eigen::MatrixXd target = s.consensus * s.label_matrix.transpose();
  const double c_score = target.cwiseProduct(s.centroids).sum();
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::MatrixXd rival =
        orthonormal_polar_factor(random_normal_matrix(4, 3, rng));
    CHECK(target.cwiseProduct(rival).sum() <= c_score + 1e-9);
  }
}

TEST_CASE("square compression is orthogonal") {
  auto inst = random_instance(5, 3, 5, 2, 2, 71);
  FusionState& s = inst.state;
  update_compression(s);
  CHECK(max_abs(s.compression * s.compression.transpose() -
                Eigen::MatrixXd::Identity(5, 5)) < 1e-8);
}

TEST_CASE("label update matches exhaustive enumeration") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = random_instance(5, 4, 4, 3, 2, 500 + trial);
    FusionState& s = inst.state;
    update_labels(s);
    const Eigen::MatrixXd scores = s.centroids.transpose() * s.consensus;
    const double attained = scores.cwiseProduct(s.label_matrix).sum();

    // brute force over all 3^5 feasible one-hot choices
    double best = -1e300;
    for (int code = 0; code < 243; ++code) {
      int c = code;
      double total = 0.0;
      for (int j = 0; j < 5; ++j) {
        total += scores(c % 3, j);
        c /= 3;
      }
      best = std::max(best, total);
    }
    CHECK(attained == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("label ties resolve to the smallest row") {
  auto inst = random_instance(4, 3, 3, 2, 2, 2);
  FusionState& s = inst.state;
  s.centroids.setZero();  // scores become all zero: every column ties
  update_labels(s);
  for (int j = 0; j < s.n(); ++j) {
    CHECK(s.label_matrix(0, j) == 1.0);
    CHECK(s.label_matrix(1, j) == 0.0);
  }
}

TEST_CASE("full run on separated blobs recovers the clustering") {
  const ViewSet views = gen_synthetic(300, 3, 3, 8.0, 7);
  const PartitionSet partitions = blob_partitions(views, 6, 7);

  Hyperparams hp = make_hp(6, 6, 3, 7);
  const ClusteringResult result = run(partitions, hp);

  CHECK(result.objective_trace.size() ==
        static_cast<std::size_t>(result.iterations) + 1);
  CHECK(accuracy(result.labels, *views.labels) >= 0.95);
  CHECK(nmi(result.labels, *views.labels) >= 0.90);
  CHECK(result.converged);

  // stopping rule holds on the recorded trace
  const auto& trace = result.objective_trace;
  const double last_delta =
      trace[trace.size() - 1] - trace[trace.size() - 2];
  CHECK(last_delta * last_delta < hp.tol);

  // determinism: identical rerun
  const ClusteringResult again = run(partitions, hp);
  CHECK((again.labels - result.labels).cwiseAbs().maxCoeff() == 0);
  REQUIRE(again.objective_trace.size() == trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i)
    CHECK(again.objective_trace[i] == trace[i]);
}

TEST_CASE("observer sees a feasible state each iteration") {
  const PartitionSet partitions = random_partitions(4, 30, 3, 3);
  Hyperparams hp = make_hp(4, 6, 3, 1);
  hp.max_iters = 15;
  hp.tol = 1e-300;
  int iterations_seen = 0;
  run(partitions, hp, [&](const FusionState& state, int iteration) {
    CHECK(invariant_violations(state, partitions).empty());
    CHECK(iteration == iterations_seen + 1);
    ++iterations_seen;
  });
  CHECK(iterations_seen >= 1);
}

TEST_CASE("non-finite rotation coefficients are an error") {
  auto inst = random_instance(8, 3, 3, 2, 2, 6);
  inst.state.consensus(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(update_rotation(inst.state, inst.partitions, 0),
                  std::runtime_error);
}

TEST_CASE("nonneg-only weight constraint and strict reconstruction modes") {
  const ViewSet views = gen_synthetic(150, 3, 2, 8.0, 23);
  const PartitionSet partitions = blob_partitions(views, 6, 23);
  Hyperparams hp = make_hp(6, 6, 3, 23);
  hp.beta_simplex = false;
  hp.strict_s = true;

  std::vector<std::string> violations;
  const ClusteringResult result =
      run(partitions, hp, [&](const FusionState& state, int) {
        const auto v = invariant_violations(state, partitions);
        violations.insert(violations.end(), v.begin(), v.end());
        CHECK(state.reconstruction.minCoeff() >= 0.0);
      });
  CHECK(violations.empty());
  CHECK(result.iterations >= 1);
}

TEST_CASE("relative stopping rule") {
  const PartitionSet partitions = random_partitions(4, 30, 2, 13);
  Hyperparams hp = make_hp(4, 5, 3, 2);
  hp.relative_stop = true;
  const ClusteringResult result = run(partitions, hp);
  CHECK(result.converged);
  const auto& trace = result.objective_trace;
  const double delta = trace[trace.size() - 1] - trace[trace.size() - 2];
  CHECK(std::abs(delta) / std::abs(trace.back()) < hp.rel_tol);
}

TEST_CASE("objective trace is bounded by the running upper bound") {
  // fusion term <= sqrt(n) tr(H H^T) since every reconstruction column is a
  // unit vector; label term <= the per-column maxima of C^T H
  const ViewSet views = gen_synthetic(120, 3, 2, 6.0, 19);
  const PartitionSet partitions = blob_partitions(views, 6, 19);
  Hyperparams hp = make_hp(6, 6, 3, 19);
  run(partitions, hp, [&](const FusionState& state, int) {
    const Eigen::MatrixXd scores =
        state.centroids.transpose() * state.consensus;
    double score_sum = 0.0;
    for (int j = 0; j < state.n(); ++j) score_sum += scores.col(j).maxCoeff();
    const double fused_energy =
        (state.consensus * state.consensus.transpose()).trace();
    const double bound =
        fused_energy * std::sqrt(double(state.n())) + score_sum;
    CHECK(state.objective_trace.back() <= bound + 1e-9);
  });
}
