#include "oslfmvc/kernels.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "oslfmvc/rng.hpp"

namespace oslfmvc {

namespace {

// nonnegative largest-magnitude entry, first index on magnitude ties
void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index top = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]);
    if (mag > best) {
      best = mag;
      top = i;
    }
  }
  if (v[top] < 0.0) v = -v;
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

Eigen::MatrixXd clamp_psd(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");
  const double spectral_scale = eig.eigenvalues().cwiseAbs().maxCoeff();
  // rounding-level negatives are already within tolerance; reconstructing
  // would perturb exact entries (e.g. a unit diagonal) for no gain
  if (eig.eigenvalues().minCoeff() >= -1e-10 * spectral_scale) return sym;
  const Eigen::VectorXd clamped = eig.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXd out = eig.eigenvectors() * clamped.asDiagonal() *
                        eig.eigenvectors().transpose();
  out = ((out + out.transpose()) * 0.5).eval();
  return out;
}

}  // namespace

KernelKind KernelKind::gaussian(double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  KernelKind kind;
  kind.family = Family::gaussian;
  kind.gamma = gamma;
  return kind;
}

KernelKind KernelKind::polynomial(int degree, double coef) {
  if (degree < 1) throw std::invalid_argument("degree must be positive");
  if (coef < 0.0) throw std::invalid_argument("coef must be nonnegative");
  KernelKind kind;
  kind.family = Family::polynomial;
  kind.degree = degree;
  kind.coef = coef;
  return kind;
}

Eigen::MatrixXd build_kernel(const Eigen::MatrixXd& view,
                             const KernelKind& kind) {
  if (!view.allFinite())
    throw std::invalid_argument("non-finite view entries");
  const Eigen::Index n = view.rows();
  Eigen::MatrixXd gram = view * view.transpose();
  gram = ((gram + gram.transpose()) * 0.5).eval();

  switch (kind.family) {
    case KernelKind::Family::linear:
      break;
    case KernelKind::Family::gaussian: {
      const Eigen::VectorXd sq = gram.diagonal();
      Eigen::MatrixXd k(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
          const double dist_sq =
              std::max(0.0, sq[i] + sq[j] - 2.0 * gram(i, j));
          const double value = std::exp(-kind.gamma * dist_sq);
          k(i, j) = value;
          k(j, i) = value;
        }
      }
      gram = std::move(k);
      break;
    }
    case KernelKind::Family::polynomial: {
      gram = (gram.array() + kind.coef)
                 .pow(static_cast<double>(kind.degree))
                 .matrix();
      gram = ((gram + gram.transpose()) * 0.5).eval();
      break;
    }
  }
  return clamp_psd(gram);
}

Eigen::MatrixXd center_kernel(const Eigen::MatrixXd& kernel) {
  const Eigen::Index n = kernel.rows();
  if (n != kernel.cols()) throw std::invalid_argument("kernel must be square");
  const Eigen::VectorXd row_mean = kernel.rowwise().mean();
  const double grand_mean = row_mean.mean();
  Eigen::MatrixXd out = kernel;
  out.colwise() -= row_mean;
  out.rowwise() -= row_mean.transpose();
  out.array() += grand_mean;
  return ((out + out.transpose()) * 0.5).eval();
}

Eigen::MatrixXd extract_partition(const Eigen::MatrixXd& kernel, int k) {
  const Eigen::Index n = kernel.rows();
  if (n != kernel.cols()) throw std::invalid_argument("kernel must be square");
  if (k < 1 || k > n) throw std::invalid_argument("require 1 <= k <= n");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(kernel);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");

  // descending eigenvalue order; solver returns ascending
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return eig.eigenvalues()[a] > eig.eigenvalues()[b];
  });

  std::vector<Eigen::VectorXd> vecs;
  vecs.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    Eigen::VectorXd v = eig.eigenvectors().col(order[i]);
    fix_sign(v);
    vecs.push_back(std::move(v));
  }

  // exact eigenvalue ties: order the sign-fixed vectors lexicographically
  int run_start = 0;
  auto value_of = [&](int i) {
    return eig.eigenvalues()[order[i]];
  };
  for (int i = 1; i <= k; ++i) {
    if (i == k || value_of(i) != value_of(run_start)) {
      std::sort(vecs.begin() + run_start, vecs.begin() + i, lex_less);
      run_start = i;
    }
  }

  Eigen::MatrixXd partition(k, n);
  for (int i = 0; i < k; ++i)
    partition.row(i) = vecs[i].transpose();
  return partition;
}

Eigen::MatrixXd extract_partition_linear(const Eigen::MatrixXd& view, int k,
                                         bool center) {
  if (k < 1 || k > view.cols() || k > view.rows())
    throw std::invalid_argument("require 1 <= k <= min(n, d)");
  Eigen::MatrixXd x = view;
  if (center) x.rowwise() -= view.colwise().mean();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU);
  // singular values are nonincreasing, so the leading k left vectors are the
  // leading eigenvectors of x x^T; exact sigma ties get the lexicographic rule
  std::vector<Eigen::VectorXd> vecs;
  vecs.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    Eigen::VectorXd v = svd.matrixU().col(i);
    fix_sign(v);
    vecs.push_back(std::move(v));
  }
  int run_start = 0;
  for (int i = 1; i <= k; ++i) {
    if (i == k || svd.singularValues()[i] != svd.singularValues()[run_start]) {
      std::sort(vecs.begin() + run_start, vecs.begin() + i, lex_less);
      run_start = i;
    }
  }
  Eigen::MatrixXd partition(k, view.rows());
  for (int i = 0; i < k; ++i)
    partition.row(i) = vecs[i].transpose();
  return partition;
}

double median_heuristic_gamma(const Eigen::MatrixXd& view,
                              std::uint64_t seed) {
  const Eigen::Index n = view.rows();
  if (n < 2) return 1.0;
  constexpr std::uint64_t kMaxPairs = 2000;

  std::vector<double> dists;
  const std::uint64_t all_pairs =
      static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n - 1) / 2;
  if (all_pairs <= kMaxPairs) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j)
        dists.push_back((view.row(i) - view.row(j)).norm());
  } else {
    Rng rng(seed);
    dists.reserve(kMaxPairs);
    while (dists.size() < kMaxPairs) {
      const auto i = static_cast<Eigen::Index>(rng.below(n));
      const auto j = static_cast<Eigen::Index>(rng.below(n));
      if (i == j) continue;
      dists.push_back((view.row(i) - view.row(j)).norm());
    }
  }
  std::nth_element(dists.begin(), dists.begin() + dists.size() / 2,
                   dists.end());
  const double median = dists[dists.size() / 2];
  if (median <= 0.0) return 1.0;
  return 1.0 / (2.0 * median * median);
}

}  // namespace oslfmvc
