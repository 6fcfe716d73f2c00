#include "oslfmvc/data_io.hpp"

#include <bit>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "oslfmvc/linalg.hpp"
#include "oslfmvc/rng.hpp"

namespace oslfmvc {

namespace fs = std::filesystem;

namespace {

constexpr char kKernelMagic[8] = {'O', 'S', 'L', 'F', 'K', 'R', 'N', '1'};

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

double parse_double(const std::string& token, const fs::path& path) {
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0' || errno == ERANGE)
    throw std::invalid_argument("invalid numeric field '" + token + "' in " +
                                path.string());
  return value;
}

std::ifstream open_input(const fs::path& path, std::ios::openmode mode) {
  std::ifstream in(path, mode);
  if (!in) throw std::invalid_argument("missing file: " + path.string());
  return in;
}

std::ofstream open_output(const fs::path& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out)
    throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::uint64_t to_le_bits(double value) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(value);
  if constexpr (std::endian::native == std::endian::big) {
    bits = __builtin_bswap64(bits);
  }
  return bits;
}

double from_le_bits(std::uint64_t bits) {
  if constexpr (std::endian::native == std::endian::big) {
    bits = __builtin_bswap64(bits);
  }
  return std::bit_cast<double>(bits);
}

}  // namespace

Eigen::MatrixXd load_csv_matrix(const fs::path& path) {
  std::ifstream in = open_input(path, std::ios::in);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream fields(line);
    std::string token;
    while (std::getline(fields, token, ',')) {
      row.push_back(parse_double(token, path));
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::invalid_argument("ragged CSV: " + path.string());
    rows.push_back(std::move(row));
  }
  if (rows.empty())
    throw std::invalid_argument("empty CSV: " + path.string());
  Eigen::MatrixXd out(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) out(i, j) = rows[i][j];
  return out;
}

void save_csv_matrix(const Eigen::MatrixXd& matrix, const fs::path& path) {
  std::ofstream out = open_output(path, std::ios::out);
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(matrix(i, j));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Eigen::VectorXi load_labels_csv(const fs::path& path) {
  std::ifstream in = open_input(path, std::ios::in);
  std::vector<int> values;
  std::string line;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (line.empty()) continue;
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(line.c_str(), &end, 10);
    if (end == line.c_str() || *end != '\0' || errno == ERANGE)
      throw std::invalid_argument("invalid label line '" + line + "' in " +
                                  path.string());
    values.push_back(static_cast<int>(v));
  }
  if (values.empty())
    throw std::invalid_argument("empty labels CSV: " + path.string());
  return Eigen::Map<Eigen::VectorXi>(values.data(),
                                     static_cast<Eigen::Index>(values.size()));
}

void save_labels_csv(const Eigen::VectorXi& labels, const fs::path& path) {
  std::ofstream out = open_output(path, std::ios::out);
  for (Eigen::Index i = 0; i < labels.size(); ++i) out << labels[i] << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void save_kernel(const Eigen::MatrixXd& kernel, const fs::path& path) {
  if (kernel.rows() != kernel.cols())
    throw std::invalid_argument("kernel must be square");
  std::ofstream out = open_output(path, std::ios::binary);
  out.write(kKernelMagic, sizeof(kKernelMagic));
  const std::uint64_t n = static_cast<std::uint64_t>(kernel.rows());
  std::uint64_t n_le = n;
  if constexpr (std::endian::native == std::endian::big)
    n_le = __builtin_bswap64(n_le);
  out.write(reinterpret_cast<const char*>(&n_le), sizeof(n_le));
  std::vector<std::uint64_t> row(kernel.cols());
  for (Eigen::Index i = 0; i < kernel.rows(); ++i) {
    for (Eigen::Index j = 0; j < kernel.cols(); ++j)
      row[j] = to_le_bits(kernel(i, j));
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(std::uint64_t)));
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Eigen::MatrixXd load_kernel(const fs::path& path) {
  std::ifstream in = open_input(path, std::ios::binary);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kKernelMagic, sizeof(magic)) != 0)
    throw std::invalid_argument("bad kernel magic: " + path.string());
  std::uint64_t n_le = 0;
  in.read(reinterpret_cast<char*>(&n_le), sizeof(n_le));
  if (!in) throw std::invalid_argument("truncated kernel: " + path.string());
  if constexpr (std::endian::native == std::endian::big)
    n_le = __builtin_bswap64(n_le);
  const Eigen::Index n = static_cast<Eigen::Index>(n_le);
  Eigen::MatrixXd kernel(n, n);
  std::vector<std::uint64_t> row(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(std::uint64_t)));
    if (!in) throw std::invalid_argument("truncated kernel: " + path.string());
    for (Eigen::Index j = 0; j < n; ++j)
      kernel(i, j) = from_le_bits(row[j]);
  }
  return kernel;
}

DatasetManifest read_manifest(const fs::path& path) {
  std::ifstream in = open_input(path, std::ios::in);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("invalid manifest JSON: " +
                                std::string(e.what()));
  }
  DatasetManifest manifest;
  try {
    manifest.view_paths = doc.at("views").get<std::vector<std::string>>();
    if (!doc.at("labels").is_null())
      manifest.labels_path = doc.at("labels").get<std::string>();
    manifest.n = doc.at("n").get<int>();
    manifest.mu = doc.at("mu").get<int>();
    if (!doc.at("seed").is_null())
      manifest.seed = doc.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("invalid manifest field: " +
                                std::string(e.what()));
  }
  if (manifest.view_paths.empty())
    throw std::invalid_argument("manifest declares no views");
  return manifest;
}

void write_manifest(const DatasetManifest& manifest, const fs::path& path) {
  nlohmann::json doc;
  doc["views"] = manifest.view_paths;
  doc["labels"] = manifest.labels_path
                      ? nlohmann::json(*manifest.labels_path)
                      : nlohmann::json(nullptr);
  doc["n"] = manifest.n;
  doc["mu"] = manifest.mu;
  doc["seed"] =
      manifest.seed ? nlohmann::json(*manifest.seed) : nlohmann::json(nullptr);
  std::ofstream out = open_output(path, std::ios::out);
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

ViewSet load_views(const fs::path& manifest_path) {
  const DatasetManifest manifest = read_manifest(manifest_path);
  const fs::path base = manifest_path.parent_path();

  ViewSet out;
  out.mu = manifest.mu;
  for (const std::string& rel : manifest.view_paths) {
    Eigen::MatrixXd view = load_csv_matrix(base / rel);
    if (view.cols() == 0)
      throw std::invalid_argument("view has no features: " + rel);
    if (!out.views.empty() && view.rows() != out.views.front().rows())
      throw std::invalid_argument("sample count mismatch");
    out.views.push_back(std::move(view));
  }
  if (out.n() != manifest.n) throw std::invalid_argument("sample count mismatch");

  if (manifest.labels_path) {
    Eigen::VectorXi labels = load_labels_csv(base / *manifest.labels_path);
    if (labels.size() != out.n())
      throw std::invalid_argument("sample count mismatch");
    std::vector<bool> seen(manifest.mu, false);
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
      if (labels[i] < 0 || labels[i] >= manifest.mu)
        throw std::invalid_argument("label out of range");
      seen[labels[i]] = true;
    }
    for (bool s : seen)
      if (!s) throw std::invalid_argument("label values must cover [0, mu)");
    out.labels = std::move(labels);
  }
  return out;
}

fs::path write_dataset(const ViewSet& views, const fs::path& dir,
                       std::optional<std::uint64_t> seed) {
  fs::create_directories(dir);
  DatasetManifest manifest;
  manifest.n = views.n();
  manifest.mu = views.mu;
  manifest.seed = seed;
  for (int v = 0; v < views.p(); ++v) {
    const std::string name = "view_" + std::to_string(v) + ".csv";
    save_csv_matrix(views.views[v], dir / name);
    manifest.view_paths.push_back(name);
  }
  if (views.labels) {
    save_labels_csv(*views.labels, dir / "labels.csv");
    manifest.labels_path = "labels.csv";
  }
  const fs::path manifest_path = dir / "manifest.json";
  write_manifest(manifest, manifest_path);
  return manifest_path;
}

ViewSet gen_synthetic(int n, int mu, int p, double separation,
                      std::uint64_t seed) {
  if (mu < 2 || n < mu) throw std::invalid_argument("require n >= mu >= 2");
  if (p < 1) throw std::invalid_argument("require p >= 1");
  if (separation < 0.0)
    throw std::invalid_argument("separation must be nonnegative");

  ViewSet out;
  out.mu = mu;
  Eigen::VectorXi labels(n);
  for (int i = 0; i < n; ++i) labels[i] = i % mu;

  Rng rng(seed);
  for (int v = 0; v < p; ++v) {
    const int dim = 10 + (v + 1);
    if (mu > dim)
      throw std::invalid_argument("cluster count exceeds view dimension");

    // centers (D/sqrt(2)) * e_c are pairwise at distance D exactly
    const double edge = separation * std::sqrt(static_cast<double>(dim));
    Eigen::MatrixXd centers = Eigen::MatrixXd::Zero(mu, dim);
    for (int c = 0; c < mu; ++c) centers(c, c) = edge / std::sqrt(2.0);

    const Eigen::MatrixXd rotation = random_orthogonal(dim, rng);
    Eigen::MatrixXd view(n, dim);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd x = centers.row(labels[i]).transpose();
      for (int j = 0; j < dim; ++j) x[j] += rng.normal();
      view.row(i) = (rotation * x).transpose();
    }
    out.views.push_back(std::move(view));
  }
  out.labels = std::move(labels);
  return out;
}

fs::path trace_csv_path(const fs::path& result_path) {
  fs::path p = result_path;
  p.replace_extension();
  p += "_trace.csv";
  return p;
}

void save_trace_csv(const std::vector<double>& trace, const fs::path& path) {
  if (trace.empty()) throw std::invalid_argument("empty run");
  std::ofstream out = open_output(path, std::ios::out);
  out << "iter,objective\n";
  for (std::size_t i = 0; i < trace.size(); ++i)
    out << i << ',' << format_double(trace[i]) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void save_result(const ClusteringResult& result, const fs::path& path) {
  if (result.objective_trace.empty())
    throw std::invalid_argument("empty run");

  nlohmann::json doc;
  doc["labels"] = std::vector<int>(result.labels.data(),
                                   result.labels.data() + result.labels.size());
  doc["objective_trace"] = result.objective_trace;
  doc["iterations"] = result.iterations;
  doc["seconds"] = result.seconds;
  doc["acc"] = result.acc ? nlohmann::json(*result.acc) : nlohmann::json(nullptr);
  doc["nmi"] = result.nmi ? nlohmann::json(*result.nmi) : nlohmann::json(nullptr);
  doc["purity"] =
      result.purity ? nlohmann::json(*result.purity) : nlohmann::json(nullptr);
  doc["seed"] = result.seed;
  doc["hyperparams"] = result.hyperparams;
  doc["converged"] = result.converged;
  doc["nonempty_clusters"] = result.nonempty_clusters;
  doc["w_step_violations"] = result.w_step_violations;

  std::ofstream out = open_output(path, std::ios::out);
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
  save_trace_csv(result.objective_trace, trace_csv_path(path));
}

ClusteringResult load_result(const fs::path& path) {
  std::ifstream in = open_input(path, std::ios::in);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("invalid result JSON: " +
                                std::string(e.what()));
  }
  ClusteringResult result;
  const auto labels = doc.at("labels").get<std::vector<int>>();
  result.labels = Eigen::Map<const Eigen::VectorXi>(
      labels.data(), static_cast<Eigen::Index>(labels.size()));
  result.objective_trace = doc.at("objective_trace").get<std::vector<double>>();
  result.iterations = doc.at("iterations").get<int>();
  result.seconds = doc.at("seconds").get<double>();
  if (!doc.at("acc").is_null()) result.acc = doc.at("acc").get<double>();
  if (!doc.at("nmi").is_null()) result.nmi = doc.at("nmi").get<double>();
  if (!doc.at("purity").is_null())
    result.purity = doc.at("purity").get<double>();
  result.seed = doc.at("seed").get<std::uint64_t>();
  result.hyperparams = doc.at("hyperparams");
  result.converged = doc.value("converged", false);
  result.nonempty_clusters = doc.value("nonempty_clusters", 0);
  result.w_step_violations = doc.value("w_step_violations", 0);
  return result;
}

}  // namespace oslfmvc
