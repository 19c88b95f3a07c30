#include "ouhardy/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ouh {

using nlohmann::json;

bool ValidationReport::ok() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

void ValidationReport::throw_if_failed() const {
  for (const auto& c : checks) {
    if (c.passed) continue;
    ErrorKind kind = ErrorKind::Config;
    if (c.name == "dimension") kind = ErrorKind::Dimension;
    else if (c.name == "matrix_symmetric" || c.name == "matrix_definite") kind = ErrorKind::DefiniteMatrix;
    else if (c.name == "poles_distinct" || c.name == "pole_count" || c.name == "pole_shape") kind = ErrorKind::Geometry;
    throw Error(kind, c.message);
  }
}

double optimal_constant(int dimension) {
  const double half = (dimension - 2) / 2.0;
  return half * half;
}

ValidationReport validate_config(const ProblemConfig& cfg) {
  ValidationReport report;
  auto add = [&](std::string name, bool passed, std::string message) {
    report.checks.push_back({std::move(name), passed, passed ? std::string{} : std::move(message)});
    return passed;
  };
  const int N = cfg.dimension;
  if (!add("dimension", N >= 3, "dimension must be >= 3 (got " + std::to_string(N) + ")")) return report;

  if (!add("pole_count", cfg.pole_count() >= 1, "at least one pole is required")) return report;
  bool shapes = true;
  for (const auto& a : cfg.poles)
    shapes = shapes && a.size() == N && a.allFinite();
  if (!add("pole_shape", shapes, "every pole must be a finite point of dimension " + std::to_string(N)))
    return report;

  const Mat& A = cfg.matrix_a;
  if (!add("matrix_shape", A.rows() == N && A.cols() == N && A.allFinite(),
           "matrix_a must be a finite " + std::to_string(N) + "x" + std::to_string(N) + " matrix"))
    return report;
  const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
  if (!add("matrix_symmetric", asym <= kSymmetryTolerance,
           "matrix_a is not symmetric (max |A - A^T| = " + std::to_string(asym) + ")"))
    return report;
  Eigen::SelfAdjointEigenSolver<Mat> eig(A, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!add("matrix_definite", lo > 0.0,
           "matrix_a is not positive definite (smallest eigenvalue " + std::to_string(lo) + ")"))
    return report;

  const int n = cfg.pole_count();
  double min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) min_gap = std::min(min_gap, (cfg.poles[i] - cfg.poles[j]).norm());
  if (!add("poles_distinct", min_gap > 0.0, "poles must be pairwise distinct")) return report;

  add("coupling", std::isfinite(cfg.coupling_c) && cfg.coupling_c >= 0.0, "coupling_c must be finite and >= 0");
  add("ims_k", cfg.ims_k >= 0.0 && cfg.ims_k < M_PI * M_PI, "ims_k must lie in [0, pi^2)");

  Geometry& g = report.geometry;
  g.dimension = N;
  g.pole_count = n;
  g.c0 = optimal_constant(N);
  g.r0 = min_gap / 2.0;
  g.trace_a = A.trace();
  g.alpha1 = lo;
  g.alpha2 = hi;
  g.det_a = eig.eigenvalues().prod();
  g.barycenter = Vec::Zero(N);
  for (const auto& a : cfg.poles) g.barycenter += a;
  g.barycenter /= n;
  for (const auto& a : cfg.poles) g.pole_spread = std::max(g.pole_spread, (a - g.barycenter).norm());
  return report;
}

Geometry derive_geometry(const ProblemConfig& cfg) {
  auto report = validate_config(cfg);
  report.throw_if_failed();
  return report.geometry;
}

ProblemConfig s1_config() {
  ProblemConfig cfg;
  cfg.dimension = 3;
  Vec a1(3), a2(3);
  a1 << -1.0, 0.0, 0.0;
  a2 << 1.0, 0.0, 0.0;
  cfg.poles = {a1, a2};
  cfg.matrix_a = Mat::Identity(3, 3);
  cfg.coupling_c = 0.25;
  cfg.ims_k = 4.0;
  return cfg;
}

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::Config, path + ": " + what);
}

void reject_unknown(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) config_error(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) config_error(path.empty() ? key : path + "." + key, "unknown key");
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) config_error(path, "expected a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) config_error(path, "expected an integer");
  return j.get<int>();
}

bool get_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) config_error(path, "expected a boolean");
  return j.get<bool>();
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) config_error(path, "expected a string");
  return j.get<std::string>();
}

}  // namespace

ProblemConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Config, std::string("parse failure: ") + e.what());
  }
  reject_unknown(root, "", {"dimension", "poles", "matrix_a", "coupling_c", "ims_k", "grid", "quadrature",
                            "evolve", "seed"});
  ProblemConfig cfg;
  if (!root.contains("dimension")) config_error("dimension", "missing");
  if (!root.contains("poles")) config_error("poles", "missing");
  cfg.dimension = get_int(root["dimension"], "dimension");
  const int N = cfg.dimension;

  const json& poles = root["poles"];
  if (!poles.is_array()) config_error("poles", "expected a list of points");
  for (std::size_t i = 0; i < poles.size(); ++i) {
    const std::string path = "poles[" + std::to_string(i) + "]";
    if (!poles[i].is_array()) config_error(path, "expected a list of coordinates");
    Vec a(static_cast<Eigen::Index>(poles[i].size()));
    for (std::size_t d = 0; d < poles[i].size(); ++d)
      a[static_cast<Eigen::Index>(d)] = get_number(poles[i][d], path + "[" + std::to_string(d) + "]");
    cfg.poles.push_back(std::move(a));
  }

  if (root.contains("matrix_a")) {
    const json& m = root["matrix_a"];
    if (!m.is_array()) config_error("matrix_a", "expected a row-major list");
    if (N < 1 || m.size() != static_cast<std::size_t>(N) * N)
      config_error("matrix_a", "expected " + std::to_string(N * N) + " entries");
    cfg.matrix_a = Mat(N, N);
    for (int r = 0; r < N; ++r)
      for (int c = 0; c < N; ++c)
        cfg.matrix_a(r, c) = get_number(m[r * N + c], "matrix_a[" + std::to_string(r * N + c) + "]");
  } else {
    cfg.matrix_a = Mat::Identity(std::max(N, 0), std::max(N, 0));
  }
  if (root.contains("coupling_c")) cfg.coupling_c = get_number(root["coupling_c"], "coupling_c");
  if (root.contains("ims_k")) cfg.ims_k = get_number(root["ims_k"], "ims_k");
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) config_error("seed", "expected a non-negative integer");
    cfg.seed = root["seed"].get<std::uint64_t>();
  }

  if (root.contains("grid")) {
    const json& g = root["grid"];
    reject_unknown(g, "grid", {"radius", "points_per_axis", "align_poles"});
    if (g.contains("radius")) cfg.grid.radius = get_number(g["radius"], "grid.radius");
    if (g.contains("points_per_axis")) cfg.grid.points_per_axis = get_int(g["points_per_axis"], "grid.points_per_axis");
    if (g.contains("align_poles")) cfg.grid.align_poles = get_bool(g["align_poles"], "grid.align_poles");
    if (cfg.grid.radius < 0.0) config_error("grid.radius", "must be >= 0 (0 selects the default)");
    if (cfg.grid.points_per_axis < 8) config_error("grid.points_per_axis", "must be >= 8");
  }
  if (root.contains("quadrature")) {
    const json& q = root["quadrature"];
    reject_unknown(q, "quadrature", {"method", "samples"});
    if (q.contains("method")) {
      const auto m = get_string(q["method"], "quadrature.method");
      if (m == "tensor") cfg.quadrature.method = QuadratureMethod::Tensor;
      else if (m == "monte_carlo") cfg.quadrature.method = QuadratureMethod::MonteCarlo;
      else config_error("quadrature.method", "expected \"tensor\" or \"monte_carlo\"");
    }
    if (q.contains("samples")) cfg.quadrature.samples = get_int(q["samples"], "quadrature.samples");
    if (cfg.quadrature.samples < 1) config_error("quadrature.samples", "must be >= 1");
  }
  if (root.contains("evolve")) {
    const json& e = root["evolve"];
    reject_unknown(e, "evolve", {"dt", "t_final", "cutoff_max", "cutoff_mode"});
    if (e.contains("dt")) cfg.evolve.dt = get_number(e["dt"], "evolve.dt");
    if (e.contains("t_final")) cfg.evolve.t_final = get_number(e["t_final"], "evolve.t_final");
    if (e.contains("cutoff_max")) cfg.evolve.cutoff_max = get_int(e["cutoff_max"], "evolve.cutoff_max");
    if (e.contains("cutoff_mode")) {
      const auto m = get_string(e["cutoff_mode"], "evolve.cutoff_mode");
      if (m == "coupled") cfg.evolve.cutoff_mode = CutoffMode::Coupled;
      else if (m == "absolute") cfg.evolve.cutoff_mode = CutoffMode::Absolute;
      else config_error("evolve.cutoff_mode", "expected \"coupled\" or \"absolute\"");
    }
    if (!(cfg.evolve.dt > 0.0)) config_error("evolve.dt", "must be > 0");
    if (!(cfg.evolve.t_final > 0.0)) config_error("evolve.t_final", "must be > 0");
    if (cfg.evolve.cutoff_max < 1) config_error("evolve.cutoff_max", "must be >= 1");
  }
  return cfg;
}

ProblemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const ProblemConfig& cfg) {
  json root;
  root["dimension"] = cfg.dimension;
  json poles = json::array();
  for (const auto& a : cfg.poles) poles.push_back(std::vector<double>(a.data(), a.data() + a.size()));
  root["poles"] = poles;
  json m = json::array();
  for (int r = 0; r < cfg.matrix_a.rows(); ++r)
    for (int c = 0; c < cfg.matrix_a.cols(); ++c) m.push_back(cfg.matrix_a(r, c));
  root["matrix_a"] = m;
  root["coupling_c"] = cfg.coupling_c;
  root["ims_k"] = cfg.ims_k;
  root["seed"] = cfg.seed;
  root["grid"] = {{"radius", cfg.grid.radius},
                  {"points_per_axis", cfg.grid.points_per_axis},
                  {"align_poles", cfg.grid.align_poles}};
  root["quadrature"] = {{"method", cfg.quadrature.method == QuadratureMethod::Tensor ? "tensor" : "monte_carlo"},
                        {"samples", cfg.quadrature.samples}};
  root["evolve"] = {{"dt", cfg.evolve.dt},
                    {"t_final", cfg.evolve.t_final},
                    {"cutoff_max", cfg.evolve.cutoff_max},
                    {"cutoff_mode", cfg.evolve.cutoff_mode == CutoffMode::Coupled ? "coupled" : "absolute"}};
  return root.dump(2);
}

std::string config_hash(const ProblemConfig& cfg) {
  const std::string canonical = config_to_json(cfg);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ouh
