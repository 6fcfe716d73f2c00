#pragma once

#include <Eigen/Dense>

namespace oslfmvc {

// Cross-tabulation of two labelings: entry (i, j) counts samples with
// predicted label i and true label j. Label vectors are 0-based; the table
// has max(label)+1 rows/columns on each side.
Eigen::MatrixXi contingency_table(const Eigen::VectorXi& pred,
                                  const Eigen::VectorXi& truth);

// Optimal-assignment clustering accuracy: the best injective matching of
// predicted clusters to classes (Hungarian method on the contingency table),
// divided by n. Invariant under relabeling of either argument.
double accuracy(const Eigen::VectorXi& pred, const Eigen::VectorXi& truth);
double accuracy_from_table(const Eigen::MatrixXi& counts);

// Normalized mutual information, I(pred;truth)/sqrt(H(pred) H(truth)) with
// natural-log entropies. Both entropies zero -> 1.0; exactly one zero -> 0.0.
double nmi(const Eigen::VectorXi& pred, const Eigen::VectorXi& truth);

// Fraction of samples lying in the dominant class of their predicted cluster.
double purity(const Eigen::VectorXi& pred, const Eigen::VectorXi& truth);

// Minimum-cost assignment on a square cost matrix (O(s^3) potentials
// method). Exposed so callers can run matchings on padded/negated tables.
double hungarian_min_cost(const Eigen::MatrixXd& cost);

}  // namespace oslfmvc
