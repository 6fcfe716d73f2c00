#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"

namespace oslfmvc {

// Outcome of one clustering run: discrete labels plus the bookkeeping needed
// for evaluation and exact replay.
struct ClusteringResult {
  Eigen::VectorXi labels;
  std::vector<double> objective_trace;
  int iterations = 0;
  double seconds = 0.0;
  std::optional<double> acc;
  std::optional<double> nmi;
  std::optional<double> purity;
  std::uint64_t seed = 0;
  nlohmann::json hyperparams = nlohmann::json::object();

  bool converged = false;
  int nonempty_clusters = 0;
  int w_step_violations = 0;

  // wall time spent inside the iterate loop (excludes setup); not serialized
  double loop_seconds = 0.0;

  double mean_iteration_seconds() const {
    return iterations > 0 ? loop_seconds / iterations : 0.0;
  }
};

}  // namespace oslfmvc
