#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "oslfmvc/result.hpp"

namespace oslfmvc {

// One multi-view dataset: p feature matrices over the same n samples plus
// optional ground-truth labels. Labels are 0-based and, when present, cover
// every value in [0, mu).
struct ViewSet {
  std::vector<Eigen::MatrixXd> views;  // view v: n x d_v
  std::optional<Eigen::VectorXi> labels;
  int mu = 0;

  int n() const {
    return views.empty() ? 0 : static_cast<int>(views.front().rows());
  }
  int p() const { return static_cast<int>(views.size()); }
};

struct DatasetManifest {
  std::vector<std::string> view_paths;  // relative to the manifest directory
  std::optional<std::string> labels_path;
  int n = 0;
  int mu = 0;
  std::optional<std::uint64_t> seed;
};

// ---- CSV / JSON / binary formats ----
//
// Feature CSV      no header; one sample per row; comma-separated decimal
//                  floats printed with 17 significant digits (reparses to
//                  the identical double).
// Labels CSV       one integer per line; line i is the label of sample i.
// Manifest JSON    {"views": [paths], "labels": path|null, "n": int,
//                   "mu": int, "seed": int|null}
// Kernel binary    8-byte magic "OSLFKRN1", u64 n (little-endian), then
//                  n*n little-endian f64 in row-major order.
// Result JSON      {"labels": [...], "objective_trace": [...],
//                   "iterations": int, "seconds": float, "acc": float|null,
//                   "nmi": float|null, "purity": float|null, "seed": int,
//                   "hyperparams": {...}} plus informative extras.
// Trace CSV        header "iter,objective"; one row per recorded value.

Eigen::MatrixXd load_csv_matrix(const std::filesystem::path& path);
void save_csv_matrix(const Eigen::MatrixXd& matrix,
                     const std::filesystem::path& path);

Eigen::VectorXi load_labels_csv(const std::filesystem::path& path);
void save_labels_csv(const Eigen::VectorXi& labels,
                     const std::filesystem::path& path);

Eigen::MatrixXd load_kernel(const std::filesystem::path& path);
void save_kernel(const Eigen::MatrixXd& kernel,
                 const std::filesystem::path& path);

DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const DatasetManifest& manifest,
                    const std::filesystem::path& path);

// Loads every view (and labels, if declared) referenced by a manifest and
// validates shape consistency against it.
ViewSet load_views(const std::filesystem::path& manifest_path);

// Writes a ViewSet as view_<v>.csv (+ labels.csv) under dir and returns the
// path of the manifest.json it creates.
std::filesystem::path write_dataset(const ViewSet& views,
                                    const std::filesystem::path& dir,
                                    std::optional<std::uint64_t> seed);

// Reproducible multi-view Gaussian blobs. View v (1-based) has dimension
// 10+v; blob centers sit pairwise at distance separation*sqrt(d_v); each
// view gets an independent random orthogonal rotation; labels are balanced
// within +-1. Output is a pure function of the arguments.
ViewSet gen_synthetic(int n, int mu, int p, double separation,
                      std::uint64_t seed);

// Result JSON at `path` plus the objective trace CSV next to it
// (<stem>_trace.csv). Throws on an empty trace.
void save_result(const ClusteringResult& result,
                 const std::filesystem::path& path);
ClusteringResult load_result(const std::filesystem::path& path);
std::filesystem::path trace_csv_path(const std::filesystem::path& result_path);
void save_trace_csv(const std::vector<double>& trace,
                    const std::filesystem::path& path);

}  // namespace oslfmvc
