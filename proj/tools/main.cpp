#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "oslfmvc/baselines.hpp"
#include "oslfmvc/data_io.hpp"
#include "oslfmvc/kernels.hpp"
#include "oslfmvc/linalg.hpp"
#include "oslfmvc/metrics.hpp"
#include "oslfmvc/optimizer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace oslfmvc;

namespace {

// ---- cache sidecars ----

std::uint64_t fnv1a(std::uint64_t hash, const char* data, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) {
    hash ^= static_cast<unsigned char>(data[i]);
    hash *= 1099511628211ull;
  }
  return hash;
}

std::uint64_t hash_file(std::uint64_t hash, const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("missing file: " + path.string());
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
    hash = fnv1a(hash, buf, static_cast<std::size_t>(in.gcount()));
  return hash;
}

std::string hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

// inputs_hash covers the referenced files' bytes plus the parameter string
std::string inputs_hash(const std::vector<fs::path>& files,
                        const std::string& params) {
  std::uint64_t hash = 1469598103934665603ull;
  for (const fs::path& f : files) hash = hash_file(hash, f);
  hash = fnv1a(hash, params.data(), params.size());
  return hex(hash);
}

bool cache_fresh(const fs::path& meta_path, const std::string& hash,
                 const std::vector<fs::path>& outputs) {
  std::ifstream in(meta_path);
  if (!in) return false;
  json meta;
  try {
    in >> meta;
  } catch (const json::exception&) {
    return false;
  }
  if (meta.value("inputs_hash", "") != hash) return false;
  for (const fs::path& out : outputs)
    if (!fs::exists(out)) return false;
  return true;
}

// ---- common loading ----

KernelSet load_kernel_dir(const fs::path& dir) {
  KernelSet kernels;
  for (int v = 0;; ++v) {
    const fs::path path = dir / ("kernel_" + std::to_string(v) + ".bin");
    if (!fs::exists(path)) break;
    Eigen::MatrixXd kernel = load_kernel(path);
    if (max_abs(kernel - kernel.transpose()) >= 1e-10)
      throw std::invalid_argument("kernel not symmetric: " + path.string());
    kernels.kernels.push_back(std::move(kernel));
  }
  if (kernels.p() == 0)
    throw std::invalid_argument("no kernel_<v>.bin files in " + dir.string());
  return kernels;
}

PartitionSet load_partition_dir(const fs::path& dir) {
  PartitionSet partitions;
  for (int v = 0;; ++v) {
    const fs::path path = dir / ("partition_" + std::to_string(v) + ".csv");
    if (!fs::exists(path)) break;
    partitions.partitions.push_back(load_csv_matrix(path));
  }
  if (partitions.p() == 0)
    throw std::invalid_argument("no partition_<v>.csv files in " +
                                dir.string());
  for (const Eigen::MatrixXd& h : partitions.partitions)
    if (h.rows() != partitions.k() || h.cols() != partitions.n())
      throw std::invalid_argument("partition shape mismatch");
  return partitions;
}

std::optional<Eigen::VectorXi> truth_from_manifest(const std::string& path) {
  if (path.empty()) return std::nullopt;
  const ViewSet views = load_views(path);
  if (!views.labels) return std::nullopt;
  return *views.labels;
}

void attach_metrics(ClusteringResult& result,
                    const std::optional<Eigen::VectorXi>& truth) {
  if (!truth) return;
  result.acc = accuracy(result.labels, *truth);
  result.nmi = nmi(result.labels, *truth);
  result.purity = purity(result.labels, *truth);
}

void write_run_outputs(const ClusteringResult& result, const fs::path& out) {
  fs::create_directories(out);
  save_result(result, out / "result.json");
  save_labels_csv(result.labels, out / "labels.csv");
}

struct KernelOptions {
  std::string kind = "auto";
  double gamma = 1.0;
  int degree = 2;
  double coef = 0.0;

  std::string param_string() const {
    return kind + "/g=" + std::to_string(gamma) +
           "/d=" + std::to_string(degree) + "/c=" + std::to_string(coef);
  }
};

KernelSet build_kernels(const ViewSet& views, const KernelOptions& opts,
                        std::uint64_t seed, std::vector<double>* gammas) {
  KernelSet kernels;
  for (int v = 0; v < views.p(); ++v) {
    const Eigen::MatrixXd& view = views.views[v];
    KernelKind kind;
    if (opts.kind == "linear") {
      kind = KernelKind::linear();
    } else if (opts.kind == "gaussian") {
      kind = KernelKind::gaussian(opts.gamma);
    } else if (opts.kind == "poly") {
      kind = KernelKind::polynomial(opts.degree, opts.coef);
    } else if (opts.kind == "auto") {
      kind = KernelKind::gaussian(median_heuristic_gamma(view, seed));
    } else {
      throw std::invalid_argument("unknown kernel kind: " + opts.kind);
    }
    if (gammas)
      gammas->push_back(
          kind.family == KernelKind::Family::gaussian ? kind.gamma : 0.0);
    kernels.kernels.push_back(build_kernel(view, kind));
  }
  return kernels;
}

PartitionSet partitions_from_kernels(const KernelSet& kernels, int k,
                                     bool center) {
  PartitionSet partitions;
  for (const Eigen::MatrixXd& kernel : kernels.kernels) {
    partitions.partitions.push_back(
        extract_partition(center ? center_kernel(kernel) : kernel, k));
  }
  return partitions;
}

// ---- subcommand state ----

struct Options {
  // shared
  std::string manifest;
  std::string out;
  std::uint64_t seed = 0;
  int k = 0;  // 0 = default 2*mu
  int m = 0;  // 0 = default 2*mu
  int mu = 2;
  double tol = 1e-3;
  int max_iters = 200;
  std::string method = "oslfmvc";
  int repeats = 20;
  bool beta_no_simplex = false;
  bool strict_s = false;
  double rel_tol = 0.0;  // > 0 switches to the relative stopping rule

  // synth
  int n = 300;
  int p = 3;
  double separation = 8.0;

  // kernels / partitions
  KernelOptions kernel;
  std::string kernels_dir;
  std::string partitions_dir;
  bool no_center = false;

  // eval
  std::string pred;
  std::string truth;

  // bench
  bool scaling = false;
  bool grid = false;
  bool convergence = false;
  std::vector<int> sizes = {2500, 5000, 10000, 20000};
  int bench_iters = 12;
};

int resolved_k(const Options& opt) { return opt.k > 0 ? opt.k : 2 * opt.mu; }
int resolved_m(const Options& opt) { return opt.m > 0 ? opt.m : 2 * opt.mu; }

Hyperparams make_hp(const Options& opt, int k) {
  Hyperparams hp;
  hp.partition_dim = k;
  hp.subspace_dim = resolved_m(opt);
  hp.num_clusters = opt.mu;
  hp.max_iters = opt.max_iters;
  hp.tol = opt.tol;
  hp.seed = opt.seed;
  hp.beta_simplex = !opt.beta_no_simplex;
  hp.strict_s = opt.strict_s;
  if (opt.rel_tol > 0.0) {
    hp.relative_stop = true;
    hp.rel_tol = opt.rel_tol;
  }
  return hp;
}

json effective_config(const Options& opt, const Hyperparams& hp) {
  json config;
  config["method"] = opt.method;
  config["k"] = hp.partition_dim;
  config["m"] = hp.subspace_dim;
  config["mu"] = hp.num_clusters;
  config["tol"] = hp.tol;
  config["max_iters"] = hp.max_iters;
  config["seed"] = hp.seed;
  config["beta_simplex"] = hp.beta_simplex;
  config["strict_s"] = hp.strict_s;
  config["relative_stop"] = hp.relative_stop;
  config["rel_tol"] = hp.rel_tol;
  if (!opt.manifest.empty()) config["manifest"] = opt.manifest;
  if (!opt.partitions_dir.empty()) config["partitions"] = opt.partitions_dir;
  if (!opt.kernels_dir.empty()) config["kernels"] = opt.kernels_dir;
  return config;
}

// ---- subcommands ----

int cmd_synth(const Options& opt) {
  const ViewSet views =
      gen_synthetic(opt.n, opt.mu, opt.p, opt.separation, opt.seed);
  const fs::path manifest = write_dataset(views, opt.out, opt.seed);
  std::cout << manifest.string() << "\n";
  return 0;
}

int cmd_kernels(const Options& opt) {
  const fs::path out(opt.out);
  const DatasetManifest manifest = read_manifest(opt.manifest);
  const fs::path base = fs::path(opt.manifest).parent_path();

  std::vector<fs::path> inputs;
  for (const std::string& rel : manifest.view_paths)
    inputs.push_back(base / rel);
  const std::string hash = inputs_hash(
      inputs, opt.kernel.param_string() + "/seed=" + std::to_string(opt.seed));

  std::vector<fs::path> outputs;
  for (int v = 0; v < static_cast<int>(manifest.view_paths.size()); ++v)
    outputs.push_back(out / ("kernel_" + std::to_string(v) + ".bin"));
  const fs::path meta_path = out / "kernels_meta.json";
  if (cache_fresh(meta_path, hash, outputs)) {
    std::cout << "cache hit: " << out.string() << "\n";
    return 0;
  }

  const ViewSet views = load_views(opt.manifest);
  std::vector<double> gammas;
  const KernelSet kernels = build_kernels(views, opt.kernel, opt.seed, &gammas);

  fs::create_directories(out);
  for (int v = 0; v < kernels.p(); ++v)
    save_kernel(kernels.kernels[v],
                outputs[v]);

  json meta;
  meta["inputs_hash"] = hash;
  meta["kind"] = opt.kernel.kind;
  meta["gamma"] = gammas;
  meta["degree"] = opt.kernel.degree;
  meta["coef"] = opt.kernel.coef;
  meta["seed"] = opt.seed;
  meta["n"] = kernels.n();
  meta["p"] = kernels.p();
  std::ofstream(meta_path) << meta.dump(2) << "\n";
  std::cout << out.string() << "\n";
  return 0;
}

int cmd_partitions(const Options& opt) {
  const fs::path in(opt.kernels_dir);
  const fs::path out(opt.out);
  const int k = resolved_k(opt);

  std::vector<fs::path> inputs;
  for (int v = 0;; ++v) {
    const fs::path path = in / ("kernel_" + std::to_string(v) + ".bin");
    if (!fs::exists(path)) break;
    inputs.push_back(path);
  }
  if (inputs.empty())
    throw std::invalid_argument("no kernel_<v>.bin files in " + in.string());
  const std::string hash = inputs_hash(
      inputs,
      "k=" + std::to_string(k) + "/center=" + std::to_string(!opt.no_center));

  std::vector<fs::path> outputs;
  for (std::size_t v = 0; v < inputs.size(); ++v)
    outputs.push_back(out / ("partition_" + std::to_string(v) + ".csv"));
  const fs::path meta_path = out / "partitions_meta.json";
  if (cache_fresh(meta_path, hash, outputs)) {
    std::cout << "cache hit: " << out.string() << "\n";
    return 0;
  }

  const KernelSet kernels = load_kernel_dir(in);
  const PartitionSet partitions =
      partitions_from_kernels(kernels, k, !opt.no_center);

  fs::create_directories(out);
  for (int v = 0; v < partitions.p(); ++v)
    save_csv_matrix(partitions.partitions[v],
                    outputs[v]);

  json meta;
  meta["inputs_hash"] = hash;
  meta["k"] = k;
  meta["center"] = !opt.no_center;
  meta["n"] = partitions.n();
  meta["p"] = partitions.p();
  std::ofstream(meta_path) << meta.dump(2) << "\n";
  std::cout << out.string() << "\n";
  return 0;
}

ClusteringResult run_baseline(const std::string& method,
                              const KernelSet& kernels, int mu,
                              const std::optional<Eigen::VectorXi>& truth,
                              std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  ClusteringResult result;
  result.seed = seed;
  if (method == "mkkm") {
    MkkmResult mk = mkkm(kernels, mu, seed);
    result.labels = std::move(mk.labels);
    result.objective_trace = std::move(mk.objective_trace);
    result.iterations = static_cast<int>(result.objective_trace.size());
    result.hyperparams["beta"] =
        std::vector<double>(mk.beta.data(), mk.beta.data() + mk.beta.size());
  } else {
    Eigen::VectorXi labels;
    int winning_view = -1;
    if (method == "avg") {
      labels = avg_kkm(kernels, mu, seed);
    } else if (method == "sb") {
      if (!truth)
        throw std::invalid_argument(
            "method sb requires a manifest with labels");
      SingleBestResult best = sb_kkm(kernels, mu, *truth, seed);
      labels = std::move(best.labels);
      winning_view = best.view;
    } else {
      throw std::invalid_argument("unknown method: " + method);
    }
    // recorded objective: within-cluster sum of squares on the spectral
    // embedding the labels came from
    Eigen::MatrixXd source;
    if (method == "avg") {
      source = kernels.kernels.front();
      for (int i = 1; i < kernels.p(); ++i)
        source += kernels.kernels[i];
      source /= static_cast<double>(kernels.p());
    } else {
      source = kernels.kernels[winning_view];
    }
    Eigen::MatrixXd embedding = extract_partition(source, mu).transpose();
    for (Eigen::Index i = 0; i < embedding.rows(); ++i) {
      const double norm = embedding.row(i).norm();
      if (norm * norm >= 1e-24) embedding.row(i) /= norm;
    }
    result.labels = labels;
    result.objective_trace = {kmeans_wcss(embedding, labels, mu)};
    result.iterations = 1;
    if (winning_view >= 0) result.hyperparams["winning_view"] = winning_view;
  }
  result.converged = true;
  result.nonempty_clusters = [&] {
    std::vector<bool> seen(mu, false);
    for (Eigen::Index i = 0; i < result.labels.size(); ++i)
      seen[result.labels[i]] = true;
    return static_cast<int>(std::count(seen.begin(), seen.end(), true));
  }();
  attach_metrics(result, truth);
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

int cmd_cluster(const Options& opt) {
  const std::optional<Eigen::VectorXi> truth =
      truth_from_manifest(opt.manifest);

  if (opt.method != "oslfmvc") {
    if (opt.kernels_dir.empty())
      throw std::invalid_argument("method " + opt.method +
                                  " requires --kernels");
    const KernelSet kernels = load_kernel_dir(opt.kernels_dir);
    ClusteringResult result =
        run_baseline(opt.method, kernels, opt.mu, truth, opt.seed);
    Hyperparams hp = make_hp(opt, resolved_k(opt));
    result.hyperparams.update(effective_config(opt, hp));
    write_run_outputs(result, opt.out);
    return 0;
  }

  if (opt.partitions_dir.empty())
    throw std::invalid_argument("method oslfmvc requires --partitions");
  const PartitionSet partitions = load_partition_dir(opt.partitions_dir);
  const Hyperparams hp = make_hp(opt, partitions.k());

  ClusteringResult result = run(partitions, hp);
  result.hyperparams = effective_config(opt, hp);
  attach_metrics(result, truth);
  write_run_outputs(result, opt.out);
  return 0;
}

int cmd_baseline(const Options& opt) {
  const KernelSet kernels = load_kernel_dir(opt.kernels_dir);
  const std::optional<Eigen::VectorXi> truth =
      truth_from_manifest(opt.manifest);
  ClusteringResult result =
      run_baseline(opt.method, kernels, opt.mu, truth, opt.seed);
  Hyperparams hp = make_hp(opt, resolved_k(opt));
  result.hyperparams.update(effective_config(opt, hp));
  write_run_outputs(result, opt.out);
  return 0;
}

int cmd_eval(const Options& opt) {
  const Eigen::VectorXi pred = load_labels_csv(opt.pred);
  const Eigen::VectorXi truth = load_labels_csv(opt.truth);
  std::printf("%.6f,%.6f,%.6f\n", accuracy(pred, truth), nmi(pred, truth),
              purity(pred, truth));
  return 0;
}

// scaling harness: partitions come from the linear-kernel SVD fast path so
// preprocessing stays O(n d^2) and timing isolates the iterate loop
double mean_iteration_seconds_at(int n, const Options& opt) {
  const ViewSet views =
      gen_synthetic(n, opt.mu, opt.p, opt.separation, opt.seed);
  PartitionSet partitions;
  const int k = resolved_k(opt);
  for (int v = 0; v < views.p(); ++v)
    partitions.partitions.push_back(extract_partition_linear(
        views.views[v], k, true));
  Hyperparams hp = make_hp(opt, k);
  hp.max_iters = opt.bench_iters;
  hp.tol = 1e-300;  // effectively: run all bench iterations
  const ClusteringResult result = oslfmvc::run(partitions, hp);
  return result.mean_iteration_seconds();
}

int cmd_bench(const Options& opt) {
  const int modes = int(opt.scaling) + int(opt.grid) + int(opt.convergence);
  if (modes != 1)
    throw std::invalid_argument(
        "bench needs exactly one of --scaling, --grid, --convergence");
  fs::create_directories(opt.out);

  if (opt.scaling) {
    std::vector<int> sizes = opt.sizes;
    std::sort(sizes.begin(), sizes.end());
    const fs::path csv_path = fs::path(opt.out) / "scaling.csv";
    std::ofstream csv(csv_path);
    csv << "n,mean_iter_seconds\n";
    for (int n : sizes) {
      const double mean = mean_iteration_seconds_at(n, opt);
      char line[64];
      std::snprintf(line, sizeof(line), "%d,%.9f\n", n, mean);
      csv << line;
      std::cout << line;
    }
    std::cout << csv_path.string() << "\n";
    return 0;
  }

  if (opt.convergence) {
    ViewSet views;
    if (!opt.manifest.empty()) {
      views = load_views(opt.manifest);
    } else {
      views = gen_synthetic(opt.n, opt.mu, opt.p, opt.separation, opt.seed);
    }
    const KernelSet kernels =
        build_kernels(views, opt.kernel, opt.seed, nullptr);
    const int k = resolved_k(opt);
    const PartitionSet partitions =
        partitions_from_kernels(kernels, k, !opt.no_center);
    const ClusteringResult result = run(partitions, make_hp(opt, k));
    save_trace_csv(result.objective_trace,
                   fs::path(opt.out) / "convergence.csv");
    std::cout << (fs::path(opt.out) / "convergence.csv").string() << "\n";
    return 0;
  }

  // grid: (k, m) over {mu, 2mu, 4mu}, best of `repeats` seeds per cell
  if (opt.manifest.empty())
    throw std::invalid_argument("grid mode requires --manifest");
  const ViewSet views = load_views(opt.manifest);
  if (!views.labels)
    throw std::invalid_argument("grid mode requires labeled data");
  const KernelSet kernels = build_kernels(views, opt.kernel, opt.seed, nullptr);

  const fs::path csv_path = fs::path(opt.out) / "grid.csv";
  std::ofstream csv(csv_path);
  csv << "k,m,acc,nmi,purity\n";
  for (int k_mult : {1, 2, 4}) {
    const int k = k_mult * opt.mu;
    const PartitionSet partitions =
        partitions_from_kernels(kernels, k, !opt.no_center);
    for (int m_mult : {1, 2, 4}) {
      const int m = m_mult * opt.mu;
      double best_acc = -1.0, best_nmi = 0.0, best_purity = 0.0;
      for (int r = 0; r < opt.repeats; ++r) {
        Options cell = opt;
        cell.k = k;
        cell.m = m;
        cell.seed = opt.seed + static_cast<std::uint64_t>(r);
        const ClusteringResult result = run(partitions, make_hp(cell, k));
        const double acc = accuracy(result.labels, *views.labels);
        if (acc > best_acc) {
          best_acc = acc;
          best_nmi = nmi(result.labels, *views.labels);
          best_purity = purity(result.labels, *views.labels);
        }
      }
      char line[96];
      std::snprintf(line, sizeof(line), "%d,%d,%.6f,%.6f,%.6f\n", k, m,
                    best_acc, best_nmi, best_purity);
      csv << line;
      std::cout << line;
    }
  }
  std::cout << csv_path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Multi-view clustering toolkit: one-step late-fusion consensus "
      "clustering in a compressed subspace, kernel k-means baselines, and "
      "clustering metrics"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", opt.seed, "random seed");
    cmd->add_option("--out", opt.out, "output directory");
  };
  auto add_hyper = [&](CLI::App* cmd) {
    cmd->add_option("--k", opt.k, "partition dimension (default 2*mu)");
    cmd->add_option("--m", opt.m, "compressed subspace scale (default 2*mu)");
    cmd->add_option("--mu", opt.mu, "number of clusters");
    cmd->add_option("--tol", opt.tol, "squared-difference stopping tolerance");
    cmd->add_option("--max-iters", opt.max_iters, "iteration cap");
    cmd->add_option("--rel-tol", opt.rel_tol,
                    "use the relative stopping rule |delta|/|obj| < rel-tol");
    cmd->add_flag("--beta-no-simplex", opt.beta_no_simplex,
                  "drop the sum-to-one constraint on view weights");
    cmd->add_flag("--strict-s", opt.strict_s,
                  "clamp reconstruction columns to be nonnegative");
  };
  auto add_kernel_opts = [&](CLI::App* cmd) {
    cmd->add_option("--kernel", opt.kernel.kind,
                    "kernel kind: linear|gaussian|poly|auto")
        ->check(CLI::IsMember({"linear", "gaussian", "poly", "auto"}));
    cmd->add_option("--gamma", opt.kernel.gamma, "gaussian bandwidth");
    cmd->add_option("--degree", opt.kernel.degree, "polynomial degree");
    cmd->add_option("--coef", opt.kernel.coef, "polynomial offset");
  };

  CLI::App* synth = app.add_subcommand("synth", "generate synthetic blobs");
  synth->add_option("--n", opt.n, "sample count");
  synth->add_option("--mu", opt.mu, "cluster count");
  synth->add_option("--p", opt.p, "view count");
  synth->add_option("--separation", opt.separation, "blob separation");
  add_common(synth);
  synth->get_option("--out")->required();

  CLI::App* kernels = app.add_subcommand("kernels", "build base kernels");
  kernels->add_option("--manifest", opt.manifest, "dataset manifest")
      ->required();
  add_kernel_opts(kernels);
  add_common(kernels);
  kernels->get_option("--out")->required();

  CLI::App* partitions =
      app.add_subcommand("partitions", "extract base partitions");
  partitions->add_option("--kernels", opt.kernels_dir, "kernel cache dir")
      ->required();
  partitions->add_option("--k", opt.k, "partition dimension (default 2*mu)");
  partitions->add_option("--mu", opt.mu, "cluster count (sets default k)");
  partitions->add_flag("--no-center", opt.no_center,
                       "skip kernel centering before extraction");
  add_common(partitions);
  partitions->get_option("--out")->required();

  CLI::App* cluster = app.add_subcommand("cluster", "run a clustering method");
  cluster->add_option("--partitions", opt.partitions_dir,
                      "partition cache dir (oslfmvc)");
  cluster->add_option("--kernels", opt.kernels_dir,
                      "kernel cache dir (baseline methods)");
  cluster->add_option("--manifest", opt.manifest,
                      "manifest with labels for scoring");
  cluster->add_option("--method", opt.method, "oslfmvc|avg|sb|mkkm")
      ->check(CLI::IsMember({"oslfmvc", "avg", "sb", "mkkm"}));
  add_hyper(cluster);
  add_common(cluster);
  cluster->get_option("--out")->required();

  CLI::App* baseline = app.add_subcommand("baseline", "run a baseline method");
  baseline->add_option("--kernels", opt.kernels_dir, "kernel cache dir")
      ->required();
  baseline->add_option("--manifest", opt.manifest,
                       "manifest with labels (required for sb)");
  baseline->add_option("--method", opt.method, "avg|sb|mkkm")
      ->required()
      ->check(CLI::IsMember({"avg", "sb", "mkkm"}));
  baseline->add_option("--mu", opt.mu, "number of clusters");
  add_common(baseline);
  baseline->get_option("--out")->required();

  CLI::App* eval = app.add_subcommand("eval", "score predictions");
  eval->add_option("--pred", opt.pred, "predicted labels CSV")->required();
  eval->add_option("--truth", opt.truth, "ground-truth labels CSV")
      ->required();

  CLI::App* bench = app.add_subcommand("bench", "benchmark harness");
  bench->add_flag("--scaling", opt.scaling, "per-iteration time vs n");
  bench->add_flag("--grid", opt.grid, "3x3 (k, m) sensitivity grid");
  bench->add_flag("--convergence", opt.convergence, "objective trace");
  bench->add_option("--sizes", opt.sizes, "scaling sample counts");
  bench->add_option("--bench-iters", opt.bench_iters,
                    "iterations per scaling run");
  bench->add_option("--repeats", opt.repeats, "seeds per grid cell");
  bench->add_option("--manifest", opt.manifest, "dataset manifest");
  bench->add_option("--n", opt.n, "synthetic sample count");
  bench->add_option("--p", opt.p, "synthetic view count");
  bench->add_option("--separation", opt.separation, "synthetic separation");
  add_kernel_opts(bench);
  add_hyper(bench);
  add_common(bench);
  bench->get_option("--out")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (synth->parsed()) return cmd_synth(opt);
    if (kernels->parsed()) return cmd_kernels(opt);
    if (partitions->parsed()) return cmd_partitions(opt);
    if (cluster->parsed()) return cmd_cluster(opt);
    if (baseline->parsed()) return cmd_baseline(opt);
    if (eval->parsed()) return cmd_eval(opt);
    if (bench->parsed()) return cmd_bench(opt);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
