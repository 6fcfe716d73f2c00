#include "oslfmvc/metrics.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "oslfmvc/rng.hpp"
#include "test_support.hpp"

using namespace oslfmvc;

namespace {

Eigen::VectorXi vec(std::initializer_list<int> values) {
  Eigen::VectorXi out(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (int v : values) out[i++] = v;
  return out;
}

Eigen::VectorXi random_labels(int n, int mu, Rng& rng) {
  Eigen::VectorXi out(n);
  for (int i = 0; i < n; ++i)
    out[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(mu)));
  return out;
}

Eigen::VectorXi permute_labels(const Eigen::VectorXi& labels,
                               const std::vector<int>& perm) {
  Eigen::VectorXi out(labels.size());
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    out[i] = perm[static_cast<std::size_t>(labels[i])];
  return out;
}

}  // namespace

TEST_CASE("contingency table counts pairs") {
  const Eigen::MatrixXi counts =
      contingency_table(vec({0, 0, 1, 1}), vec({0, 1, 1, 1}));
  REQUIRE(counts.rows() == 2);
  REQUIRE(counts.cols() == 2);
  CHECK(counts(0, 0) == 1);
  CHECK(counts(0, 1) == 1);
  CHECK(counts(1, 0) == 0);
  CHECK(counts(1, 1) == 2);
  CHECK(counts.sum() == 4);
}

TEST_CASE("accuracy basics") {
  const Eigen::VectorXi truth = vec({0, 1, 2, 0, 1, 2});
  CHECK(accuracy(truth, truth) == doctest::Approx(1.0));

  // relabeled by a permutation: still perfect
  const Eigen::VectorXi relabeled = permute_labels(truth, {2, 0, 1});
  CHECK(accuracy(relabeled, truth) == doctest::Approx(1.0));

  CHECK(accuracy(vec({0, 0, 1, 1}), vec({0, 1, 1, 1})) ==
        doctest::Approx(0.75));
}

TEST_CASE("accuracy equals brute-force assignment on random tables") {
  Rng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(10));
    const int mu_pred = 1 + static_cast<int>(rng.below(4));
    const int mu_true = 1 + static_cast<int>(rng.below(4));
    Eigen::VectorXi pred(n), truth(n);
    for (int i = 0; i < n; ++i) {
      pred[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(mu_pred)));
      truth[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(mu_true)));
    }
    const Eigen::MatrixXi counts = contingency_table(pred, truth);
    const double expected =
        static_cast<double>(testsupport::brute_force_matching(counts)) / n;
    CHECK(accuracy(pred, truth) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("nmi reference values") {
  CHECK(nmi(vec({0, 1, 0, 1}), vec({1, 0, 1, 0})) == doctest::Approx(1.0));

  // crossing design carries zero mutual information
  CHECK(nmi(vec({0, 0, 1, 1}), vec({0, 1, 0, 1})) == doctest::Approx(0.0));

  // hand-derived: MI = (3/4) ln(4/3), H_pred = ln 2,
  // H_truth = 2 ln 2 - (3/4) ln 3
  const double mi = 0.75 * std::log(4.0 / 3.0);
  const double h_pred = std::log(2.0);
  const double h_truth = 2.0 * std::log(2.0) - 0.75 * std::log(3.0);
  const double expected = mi / std::sqrt(h_pred * h_truth);
  CHECK(nmi(vec({0, 0, 1, 1}), vec({0, 1, 1, 1})) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("nmi entropy edge cases") {
  CHECK(nmi(vec({0, 0, 0}), vec({0, 0, 0})) == doctest::Approx(1.0));
  CHECK(nmi(vec({0, 0, 0}), vec({0, 1, 2})) == doctest::Approx(0.0));
  CHECK(nmi(vec({0, 1, 2}), vec({0, 0, 0})) == doctest::Approx(0.0));
}

TEST_CASE("purity") {
  const Eigen::VectorXi truth = vec({0, 1, 2, 0});
  CHECK(purity(truth, truth) == doctest::Approx(1.0));

  // one predicted cluster holding classes sized (3, 1)
  CHECK(purity(vec({0, 0, 0, 0}), vec({1, 1, 1, 0})) == doctest::Approx(0.75));

  CHECK(purity(vec({0, 0, 1, 1}), vec({0, 1, 1, 1})) == doctest::Approx(0.75));
}

TEST_CASE("purity is 1 exactly when predicted clusters are class-pure") {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 4 + static_cast<int>(rng.below(8));
    const Eigen::VectorXi pred = random_labels(n, 3, rng);
    const Eigen::VectorXi truth = random_labels(n, 3, rng);
    bool pure = true;
    for (int c = 0; c < 3 && pure; ++c) {
      int seen = -1;
      for (int i = 0; i < n; ++i) {
        if (pred[i] != c) continue;
        if (seen == -1) seen = truth[i];
        if (truth[i] != seen) pure = false;
      }
    }
    CHECK((purity(pred, truth) == 1.0) == pure);
  }
}

TEST_CASE("metrics are invariant under relabeling either side") {
  Rng rng(7);
  const std::vector<std::vector<int>> perms3 = {
      {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 6 + static_cast<int>(rng.below(10));
    const Eigen::VectorXi pred = random_labels(n, 3, rng);
    const Eigen::VectorXi truth = random_labels(n, 3, rng);
    const double acc0 = accuracy(pred, truth);
    const double nmi0 = nmi(pred, truth);
    const double pur0 = purity(pred, truth);
    const auto& perm = perms3[static_cast<std::size_t>(rng.below(6))];
    const Eigen::VectorXi pred2 = permute_labels(pred, perm);
    const Eigen::VectorXi truth2 = permute_labels(truth, perm);
    CHECK(accuracy(pred2, truth) == doctest::Approx(acc0).epsilon(1e-12));
    CHECK(accuracy(pred, truth2) == doctest::Approx(acc0).epsilon(1e-12));
    CHECK(nmi(pred2, truth) == doctest::Approx(nmi0).epsilon(1e-12));
    CHECK(purity(pred, truth2) == doctest::Approx(pur0).epsilon(1e-12));
  }
}

TEST_CASE("error paths") {
  CHECK_THROWS_WITH_AS(accuracy(vec({0, 1}), vec({0, 1, 1})),
                       "length mismatch", std::invalid_argument);
  CHECK_THROWS_AS(nmi(vec({0}), vec({0, 1})), std::invalid_argument);
  CHECK_THROWS_AS(purity(vec({0, 1}), vec({0})), std::invalid_argument);
}
