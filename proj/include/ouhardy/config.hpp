#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ouhardy/error.hpp"

namespace ouh {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct GridSettings {
  double radius = 0.0;  // 0 selects the default radius derived from the geometry
  int points_per_axis = 48;
  bool align_poles = true;
};

enum class QuadratureMethod { Tensor, MonteCarlo };

struct QuadratureSettings {
  QuadratureMethod method = QuadratureMethod::Tensor;
  int samples = 100000;
};

// min(V, c*k) versus min(V, k) for the cut-off potential.
enum class CutoffMode { Coupled, Absolute };

struct EvolveSettings {
  double dt = 1e-2;
  double t_final = 0.5;
  int cutoff_max = 512;
  CutoffMode cutoff_mode = CutoffMode::Coupled;
};

struct ProblemConfig {
  int dimension = 3;
  std::vector<Vec> poles;
  Mat matrix_a;
  double coupling_c = 0.25;
  double ims_k = 4.0;
  GridSettings grid;
  QuadratureSettings quadrature;
  EvolveSettings evolve;
  std::uint64_t seed = 20240917;

  int pole_count() const { return static_cast<int>(poles.size()); }
};

// Quantities derived once from a valid configuration.
struct Geometry {
  int dimension = 0;
  int pole_count = 0;
  double c0 = 0.0;        // ((N-2)/2)^2
  double r0 = 0.0;        // half the minimal pole separation (infinity for one pole)
  double trace_a = 0.0;
  double alpha1 = 0.0;    // smallest eigenvalue of A
  double alpha2 = 0.0;    // largest eigenvalue of A
  double det_a = 0.0;
  Vec barycenter;
  double pole_spread = 0.0;  // max_i |a_i - barycenter|
};

struct ValidationCheck {
  std::string name;
  bool passed = false;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  Geometry geometry;  // populated only as far as the checks allow

  bool ok() const;
  // Throws the error that corresponds to the first failing check.
  void throw_if_failed() const;
};

inline constexpr double kSymmetryTolerance = 1e-12;

double optimal_constant(int dimension);

ValidationReport validate_config(const ProblemConfig& cfg);

// Validates and returns the derived geometry, throwing on the first violation.
Geometry derive_geometry(const ProblemConfig& cfg);

// The reference configuration used throughout the tests and the acceptance
// suite: N=3, poles (+-1,0,0), A = I, c = 1/4.
ProblemConfig s1_config();

// Loading and serialization of the JSON configuration file. Unknown keys are
// rejected with a Config error naming the offending path.
ProblemConfig parse_config(const std::string& text);
ProblemConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ProblemConfig& cfg);

// FNV-1a over the canonical JSON serialization, printed as 16 hex digits.
std::string config_hash(const ProblemConfig& cfg);

}  // namespace ouh
