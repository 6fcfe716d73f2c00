#include "oslfmvc/baselines.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "oslfmvc/metrics.hpp"
#include "oslfmvc/rng.hpp"

namespace oslfmvc {

namespace {

// squared distances from every point to one center
Eigen::VectorXd dist_sq_to(const Eigen::MatrixXd& points,
                           const Eigen::VectorXd& center) {
  return (points.rowwise() - center.transpose()).rowwise().squaredNorm();
}

Eigen::MatrixXd kmeanspp_centers(const Eigen::MatrixXd& points, int mu,
                                 Rng& rng) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd centers(mu, points.cols());
  centers.row(0) =
      points.row(static_cast<Eigen::Index>(rng.below(n)));
  Eigen::VectorXd nearest = dist_sq_to(points, centers.row(0).transpose());
  for (int c = 1; c < mu; ++c) {
    const double total = nearest.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      for (; pick < n - 1; ++pick) {
        target -= nearest[pick];
        if (target <= 0.0) break;
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.below(n));
    }
    centers.row(c) = points.row(pick);
    nearest = nearest.cwiseMin(dist_sq_to(points, centers.row(c).transpose()));
  }
  return centers;
}

struct LloydOutcome {
  Eigen::VectorXi labels;
  double wcss = std::numeric_limits<double>::infinity();
};

LloydOutcome lloyd_once(const Eigen::MatrixXd& points, int mu, Rng& rng) {
  constexpr int kMaxSweeps = 100;
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd centers = kmeanspp_centers(points, mu, rng);
  Eigen::VectorXi labels = Eigen::VectorXi::Constant(n, -1);

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (points.row(i) - centers.row(0)).squaredNorm();
      for (int c = 1; c < mu; ++c) {
        const double d = (points.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }
    if (!changed) break;

    centers.setZero();
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(mu);
    for (Eigen::Index i = 0; i < n; ++i) {
      centers.row(labels[i]) += points.row(i);
      ++counts[labels[i]];
    }
    for (int c = 0; c < mu; ++c) {
      if (counts[c] > 0) {
        centers.row(c) /= counts[c];
      } else {
        // empty cluster: restart its center at the point farthest from its
        // current center
        Eigen::Index far = 0;
        double far_d = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          const double d =
              (points.row(i) - centers.row(labels[i])).squaredNorm();
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        centers.row(c) = points.row(far);
      }
    }
  }

  LloydOutcome out;
  out.labels = labels;
  out.wcss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    out.wcss += (points.row(i) - centers.row(labels[i])).squaredNorm();
  return out;
}

Eigen::MatrixXd normalized_embedding(const Eigen::MatrixXd& partition) {
  // partition rows are eigenvectors; samples are the columns
  Eigen::MatrixXd embedding = partition.transpose();
  for (Eigen::Index i = 0; i < embedding.rows(); ++i) {
    const double norm = embedding.row(i).norm();
    if (norm * norm >= 1e-24) embedding.row(i) /= norm;
  }
  return embedding;
}

Eigen::VectorXi cluster_embedding(const Eigen::MatrixXd& embedding, int mu,
                                  std::uint64_t seed) {
  Eigen::VectorXi labels = lloyd_kmeans(embedding, mu, seed);
  for (Eigen::Index i = 0; i < embedding.rows(); ++i)
    if (embedding.row(i).squaredNorm() < 1e-24) labels[i] = 0;
  return labels;
}

}  // namespace

Eigen::VectorXi lloyd_kmeans(const Eigen::MatrixXd& points, int mu,
                             std::uint64_t seed, int restarts) {
  const Eigen::Index n = points.rows();
  if (mu < 1 || n < mu) throw std::invalid_argument("require mu <= n");
  if (mu == 1) return Eigen::VectorXi::Zero(n);

  Rng rng(seed);
  LloydOutcome best;
  for (int r = 0; r < restarts; ++r) {
    LloydOutcome candidate = lloyd_once(points, mu, rng);
    if (candidate.wcss < best.wcss) best = std::move(candidate);
  }
  return best.labels;
}

double kmeans_wcss(const Eigen::MatrixXd& points, const Eigen::VectorXi& labels,
                   int mu) {
  Eigen::MatrixXd centers = Eigen::MatrixXd::Zero(mu, points.cols());
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(mu);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    centers.row(labels[i]) += points.row(i);
    ++counts[labels[i]];
  }
  for (int c = 0; c < mu; ++c)
    if (counts[c] > 0) centers.row(c) /= counts[c];
  double wcss = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    wcss += (points.row(i) - centers.row(labels[i])).squaredNorm();
  return wcss;
}

Eigen::VectorXi kernel_kmeans(const Eigen::MatrixXd& kernel, int mu,
                              std::uint64_t seed) {
  if (mu > kernel.rows()) throw std::invalid_argument("require mu <= n");
  const Eigen::MatrixXd partition = extract_partition(kernel, mu);
  return cluster_embedding(normalized_embedding(partition), mu, seed);
}

Eigen::VectorXi avg_kkm(const KernelSet& kernels, int mu, std::uint64_t seed) {
  if (kernels.p() == 0) throw std::invalid_argument("no kernels");
  Eigen::MatrixXd average = kernels.kernels.front();
  for (int i = 1; i < kernels.p(); ++i)
    average += kernels.kernels[i];
  average /= static_cast<double>(kernels.p());
  return kernel_kmeans(average, mu, seed);
}

SingleBestResult sb_kkm(const KernelSet& kernels, int mu,
                        const Eigen::VectorXi& truth, std::uint64_t seed) {
  if (kernels.p() == 0) throw std::invalid_argument("no kernels");
  if (truth.size() != kernels.n())
    throw std::invalid_argument("missing or mismatched ground truth");

  SingleBestResult best;
  best.acc = -1.0;
  for (int v = 0; v < kernels.p(); ++v) {
    Eigen::VectorXi labels =
        kernel_kmeans(kernels.kernels[v], mu, seed);
    const double acc = accuracy(labels, truth);
    if (acc > best.acc) {
      best.labels = std::move(labels);
      best.view = v;
      best.acc = acc;
    }
  }
  return best;
}

MkkmResult mkkm(const KernelSet& kernels, int mu, std::uint64_t seed,
                int max_iters) {
  const int p = kernels.p();
  if (p == 0) throw std::invalid_argument("no kernels");
  if (mu > kernels.n()) throw std::invalid_argument("require mu <= n");

  MkkmResult result;
  result.beta = Eigen::VectorXd::Constant(p, 1.0 / p);

  Eigen::MatrixXd partition;
  double previous = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < max_iters; ++iter) {
    Eigen::MatrixXd weighted =
        Eigen::MatrixXd::Zero(kernels.n(), kernels.n());
    for (int i = 0; i < p; ++i)
      weighted += result.beta[i] * result.beta[i] *
                  kernels.kernels[i];

    partition = extract_partition(weighted, mu);

    // per-view residual tr(K_i (I - H^T H)) = tr(K_i) - <H K_i, H>
    Eigen::VectorXd residual(p);
    for (int i = 0; i < p; ++i) {
      const Eigen::MatrixXd& k = kernels.kernels[i];
      residual[i] = k.trace() - (partition * k).cwiseProduct(partition).sum();
    }

    int perfect = -1;
    for (int i = 0; i < p; ++i) {
      if (residual[i] <= 1e-14) {
        perfect = i;
        break;
      }
    }
    if (perfect >= 0) {
      result.beta.setZero();
      result.beta[perfect] = 1.0;
    } else {
      result.beta = residual.cwiseInverse();
      result.beta /= result.beta.sum();
    }

    double objective = 0.0;
    for (int i = 0; i < p; ++i)
      objective += result.beta[i] * result.beta[i] * residual[i];
    result.objective_trace.push_back(objective);
    if (std::abs(previous - objective) < 1e-6) break;
    previous = objective;
  }

  result.labels = cluster_embedding(normalized_embedding(partition), mu, seed);
  return result;
}

}  // namespace oslfmvc
