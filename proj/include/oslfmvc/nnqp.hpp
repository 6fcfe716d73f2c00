#pragma once

#include <Eigen/Dense>

namespace oslfmvc {

// min_b  b^T M b + f^T b  over  b >= 0, optionally with sum(b) = 1.
// M is symmetrized on construction; the quadratic form only sees the
// symmetric part, so this does not change the objective.
struct QpProblem {
  Eigen::MatrixXd quad;    // symmetric p x p
  Eigen::VectorXd linear;  // p
  bool simplex = true;

  QpProblem(Eigen::MatrixXd m, Eigen::VectorXd f, bool on_simplex);

  double objective(const Eigen::VectorXd& b) const {
    return b.dot(quad * b) + linear.dot(b);
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& b) const {
    return 2.0 * (quad * b) + linear;
  }
  int dim() const { return static_cast<int>(linear.size()); }
};

// Euclidean projection onto the probability simplex (sorting method).
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v);

// Projection onto the problem's feasible set (simplex or nonneg orthant).
Eigen::VectorXd project_feasible(const QpProblem& problem,
                                 const Eigen::VectorXd& v);

// Natural-map stationarity residual ||b - proj(b - grad(b))||_2; zero at a
// KKT point of the constrained problem.
double kkt_residual(const QpProblem& problem, const Eigen::VectorXd& b);

struct QpOptions {
  int max_iters = 5000;        // inner iteration cap per start
  double residual_tol = 1e-9;  // stationarity stop
};

// Projected gradient descent with backtracking line search. Descends from
// the warm start plus deterministic seeds (uniform point, vertices, per-face
// stationary points) so indefinite problems still reach the global simplex
// minimum; the best endpoint wins. The returned point is feasible and never
// worse than the warm start (monotone safeguard). A zero problem returns
// the warm start unchanged.
Eigen::VectorXd solve_qp(const QpProblem& problem,
                         const Eigen::VectorXd& warm_start,
                         const QpOptions& options = {});

}  // namespace oslfmvc
