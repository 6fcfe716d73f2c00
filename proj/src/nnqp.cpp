#include "oslfmvc/nnqp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace oslfmvc {

QpProblem::QpProblem(Eigen::MatrixXd m, Eigen::VectorXd f, bool on_simplex)
    : quad(std::move(m)), linear(std::move(f)), simplex(on_simplex) {
  if (quad.rows() != quad.cols() || quad.rows() != linear.size())
    throw std::invalid_argument("qp dimensions inconsistent");
  if (!quad.allFinite() || !linear.allFinite())
    throw std::invalid_argument("non-finite qp coefficients");
  quad = ((quad + quad.transpose()) * 0.5).eval();
}

Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
  const int p = static_cast<int>(v.size());
  std::vector<double> sorted(v.data(), v.data() + p);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumulative = 0.0;
  double tau = 0.0;
  int support = 0;
  for (int j = 0; j < p; ++j) {
    cumulative += sorted[j];
    const double candidate = (cumulative - 1.0) / (j + 1);
    if (sorted[j] - candidate > 0.0) {
      tau = candidate;
      support = j + 1;
    }
  }
  if (support == 0) tau = (cumulative - 1.0) / p;
  return (v.array() - tau).max(0.0).matrix();
}

Eigen::VectorXd project_feasible(const QpProblem& problem,
                                 const Eigen::VectorXd& v) {
  if (problem.simplex) return project_simplex(v);
  return v.cwiseMax(0.0);
}

double kkt_residual(const QpProblem& problem, const Eigen::VectorXd& b) {
  return (b - project_feasible(problem, b - problem.gradient(b))).norm();
}

namespace {

// projected gradient descent with backtracking from one start
Eigen::VectorXd descend(const QpProblem& problem, Eigen::VectorXd b,
                        const QpOptions& options) {
  double obj = problem.objective(b);

  // 1/L with L from the Frobenius norm of the Hessian; the line search
  // corrects any misestimate, including indefinite M
  const double hessian_scale = 2.0 * problem.quad.norm();
  double step = hessian_scale > 0.0 ? 1.0 / hessian_scale : 1.0;

  // without the simplex the problem can be unbounded below; a norm cap keeps
  // the nonneg-only mode finite
  constexpr double kNormCap = 1e6;

  for (int iter = 0; iter < options.max_iters; ++iter) {
    const Eigen::VectorXd grad = problem.gradient(b);
    if ((b - project_feasible(problem, b - grad)).norm() < options.residual_tol)
      break;

    bool moved = false;
    for (int halving = 0; halving < 60; ++halving) {
      const Eigen::VectorXd candidate =
          project_feasible(problem, b - step * grad);
      const Eigen::VectorXd delta = candidate - b;
      const double delta_sq = delta.squaredNorm();
      if (delta_sq == 0.0) break;
      const double cand_obj = problem.objective(candidate);
      // prox-style sufficient decrease
      if (std::isfinite(cand_obj) &&
          cand_obj <= obj + grad.dot(delta) + 0.5 / step * delta_sq) {
        b = candidate;
        obj = cand_obj;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
    if (!problem.simplex && b.lpNorm<1>() > kNormCap) break;
    step *= 1.5;
  }
  return b;
}

// Stationary points of the restriction to each face of the feasible set.
// The quadratic attains its constrained minimum at one of these (or at a
// vertex), so descending from every candidate makes the search global for
// indefinite M. Faces are enumerated only while 2^p stays trivial.
void face_candidates(const QpProblem& problem,
                     std::vector<Eigen::VectorXd>& starts) {
  const int p = problem.dim();
  if (p > 12) return;
  for (unsigned mask = 1; mask < (1u << p); ++mask) {
    std::vector<int> support;
    for (int i = 0; i < p; ++i)
      if (mask & (1u << i)) support.push_back(i);
    const int s = static_cast<int>(support.size());

    if (problem.simplex) {
      // KKT system of min b^T M b + f^T b over the face, sum(b) = 1
      Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(s + 1, s + 1);
      Eigen::VectorXd rhs(s + 1);
      for (int a = 0; a < s; ++a) {
        for (int c = 0; c < s; ++c)
          kkt(a, c) = 2.0 * problem.quad(support[a], support[c]);
        kkt(a, s) = 1.0;
        kkt(s, a) = 1.0;
        rhs[a] = -problem.linear[support[a]];
      }
      rhs[s] = 1.0;
      const Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
      if (!lu.isInvertible()) continue;
      const Eigen::VectorXd solution = lu.solve(rhs);
      Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
      bool feasible = true;
      for (int a = 0; a < s; ++a) {
        b[support[a]] = solution[a];
        if (solution[a] < 0.0) feasible = false;
      }
      if (feasible) starts.push_back(std::move(b));
    } else {
      // unconstrained stationary point on the face b_F free, rest zero
      Eigen::MatrixXd quad_f(s, s);
      Eigen::VectorXd lin_f(s);
      for (int a = 0; a < s; ++a) {
        for (int c = 0; c < s; ++c)
          quad_f(a, c) = 2.0 * problem.quad(support[a], support[c]);
        lin_f[a] = -problem.linear[support[a]];
      }
      const Eigen::FullPivLU<Eigen::MatrixXd> lu(quad_f);
      if (!lu.isInvertible()) continue;
      const Eigen::VectorXd solution = lu.solve(lin_f);
      if (solution.minCoeff() < 0.0) continue;
      Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
      for (int a = 0; a < s; ++a) b[support[a]] = solution[a];
      starts.push_back(std::move(b));
    }
  }
}

}  // namespace

Eigen::VectorXd solve_qp(const QpProblem& problem,
                         const Eigen::VectorXd& warm_start,
                         const QpOptions& options) {
  const int p = problem.dim();
  if (warm_start.size() != p)
    throw std::invalid_argument("warm start dimension mismatch");
  if (problem.simplex && p == 1) return Eigen::VectorXd::Ones(1);
  if (problem.quad.isZero(0.0) && problem.linear.isZero(0.0))
    return warm_start;

  const Eigen::VectorXd start = project_feasible(problem, warm_start);

  std::vector<Eigen::VectorXd> starts;
  starts.push_back(start);
  if (problem.simplex) {
    starts.push_back(Eigen::VectorXd::Constant(p, 1.0 / p));
    for (int i = 0; i < p; ++i)
      starts.push_back(Eigen::VectorXd::Unit(p, i));
  } else {
    starts.push_back(Eigen::VectorXd::Zero(p));
  }
  face_candidates(problem, starts);

  Eigen::VectorXd best = start;
  double best_obj = problem.objective(start);
  for (const Eigen::VectorXd& s : starts) {
    const Eigen::VectorXd candidate = descend(problem, s, options);
    const double obj = problem.objective(candidate);
    if (obj < best_obj) {
      best = candidate;
      best_obj = obj;
    }
  }

  // monotone safeguard: never return a point worse than the warm start
  if (best_obj > problem.objective(start)) return start;
  return best;
}

}  // namespace oslfmvc
