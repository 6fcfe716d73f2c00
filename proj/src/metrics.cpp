#include "oslfmvc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace oslfmvc {

namespace {

void check_lengths(const Eigen::VectorXi& pred, const Eigen::VectorXi& truth) {
  if (pred.size() == 0 || truth.size() == 0)
    throw std::invalid_argument("empty input");
  if (pred.size() != truth.size())
    throw std::invalid_argument("length mismatch");
}

}  // namespace

Eigen::MatrixXi contingency_table(const Eigen::VectorXi& pred,
                                  const Eigen::VectorXi& truth) {
  check_lengths(pred, truth);
  if (pred.minCoeff() < 0 || truth.minCoeff() < 0)
    throw std::invalid_argument("negative label");
  const int rows = pred.maxCoeff() + 1;
  const int cols = truth.maxCoeff() + 1;
  Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(rows, cols);
  for (Eigen::Index i = 0; i < pred.size(); ++i)
    counts(pred[i], truth[i]) += 1;
  return counts;
}

double hungarian_min_cost(const Eigen::MatrixXd& cost) {
  if (cost.rows() != cost.cols())
    throw std::invalid_argument("cost matrix must be square");
  const int n = static_cast<int>(cost.rows());
  if (n == 0) return 0.0;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // potentials u, v; p[j] = row matched to column j (1-based, 0 = none)
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  double total = 0.0;
  for (int j = 1; j <= n; ++j) total += cost(match[j] - 1, j - 1);
  return total;
}

double accuracy_from_table(const Eigen::MatrixXi& counts) {
  const long total = counts.sum();
  if (total <= 0) throw std::invalid_argument("empty input");
  // maximize matched count == minimize negated counts, padded square so a
  // rectangular table becomes an injective assignment from the smaller side
  const int side = static_cast<int>(std::max(counts.rows(), counts.cols()));
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(side, side);
  cost.topLeftCorner(counts.rows(), counts.cols()) =
      -counts.cast<double>();
  return -hungarian_min_cost(cost) / static_cast<double>(total);
}

double accuracy(const Eigen::VectorXi& pred, const Eigen::VectorXi& truth) {
  return accuracy_from_table(contingency_table(pred, truth));
}

double nmi(const Eigen::VectorXi& pred, const Eigen::VectorXi& truth) {
  const Eigen::MatrixXi counts = contingency_table(pred, truth);
  const double n = static_cast<double>(counts.sum());
  const Eigen::VectorXi row_sums = counts.rowwise().sum();
  const Eigen::VectorXi col_sums = counts.colwise().sum();

  auto entropy = [n](const Eigen::VectorXi& sums) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < sums.size(); ++i) {
      if (sums[i] == 0) continue;
      const double q = sums[i] / n;
      h -= q * std::log(q);
    }
    return h;
  };
  const double h_pred = entropy(row_sums);
  const double h_truth = entropy(col_sums);
  if (h_pred == 0.0 && h_truth == 0.0) return 1.0;
  if (h_pred == 0.0 || h_truth == 0.0) return 0.0;

  double mi = 0.0;
  for (Eigen::Index i = 0; i < counts.rows(); ++i) {
    for (Eigen::Index j = 0; j < counts.cols(); ++j) {
      if (counts(i, j) == 0) continue;
      const double pij = counts(i, j) / n;
      mi += pij * std::log(pij * n * n /
                           (static_cast<double>(row_sums[i]) * col_sums[j]));
    }
  }
  const double value = mi / std::sqrt(h_pred * h_truth);
  return std::clamp(value, 0.0, 1.0);
}

double purity(const Eigen::VectorXi& pred, const Eigen::VectorXi& truth) {
  const Eigen::MatrixXi counts = contingency_table(pred, truth);
  long matched = 0;
  for (Eigen::Index i = 0; i < counts.rows(); ++i)
    matched += counts.row(i).maxCoeff();
  return static_cast<double>(matched) / static_cast<double>(counts.sum());
}

}  // namespace oslfmvc
