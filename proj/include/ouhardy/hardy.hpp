#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ouhardy/form.hpp"

namespace ouh {

struct HardyConstants {
  double coupling = 0.0;
  double k = 0.0;
  double r0 = 0.0;
  double c0 = 0.0;
  double K = 0.0;           // (k + (n+1) c) / r0^2 + (n/2) Tr A
  double K_improved = 0.0;  // (n/2) Tr A
};

HardyConstants hardy_constants(const ProblemConfig& cfg);

// Truncated Gaussian bump  amplitude * exp(-sharpness |x - center|^2), set to
// zero outside radius 4/sqrt(sharpness) (where it has dropped to e^{-16}).
struct Bump {
  Vec center;
  double amplitude = 1.0;
  double sharpness = 1.0;

  double support_radius() const;
  double operator()(const Vec& x) const;
};

// Bumps whose supports fit inside the grid box, centers drawn around the poles
// and the barycenter. Deterministic for a given seed.
std::vector<Bump> bump_suite(const ProblemConfig& cfg, const Grid& grid, int count, std::uint64_t seed);

struct HardyReport {
  double coupling = 0.0;
  double constant = 0.0;  // K in rhs = dirichlet + K mass
  double lhs = 0.0;       // c sum_i \int phi^2 / |x - a_i|^2 dmu
  double dirichlet = 0.0; // \int |grad phi|^2 dmu
  double mass = 0.0;      // \int phi^2 dmu
  double rhs = 0.0;
  double margin = 0.0;    // rhs - lhs
  double resolution = 0.0;
};

// c sum_i \int f |x - a_i|^{-2} dx for a smooth node field f; poles outside the
// box contribute plain lattice sums.
double inverse_square_integral(const ScalarField& f, const std::vector<Vec>& poles);

// Evaluates the three integrals of the weighted Hardy inequality for phi with
// coupling c and right-hand constant K. phi must vanish on the box faces.
HardyReport hardy_terms(const ScalarField& phi, const GaussianMeasure& measure, double coupling, double constant);

// Coupling and K from the configuration.
HardyReport hardy_report(const ScalarField& phi, const GaussianMeasure& measure);

// Improved form: coupling c0/n with constant (n/2) Tr A.
HardyReport improved_report(const ScalarField& phi, const GaussianMeasure& measure);

struct HardyCheck {
  HardyReport coarse;
  HardyReport fine;
  double error_bar = 0.0;  // |margin(coarse) - margin(fine)|
};

enum class HardyVariant { Standard, Improved };

// Report on grid and on its refinement; margin taken from the refined level.
HardyCheck hardy_check(const std::function<double(const Vec&)>& phi, const GaussianMeasure& measure, const Grid& grid,
                       HardyVariant variant);

struct SpectralEstimate {
  double value = 0.0;
  std::optional<double> k_cut;
  int iterations = 0;
  double residual = 0.0;
  ScalarField eigenvector;  // L^2_mu normalized, zero on the faces and on excluded nodes
};

inline constexpr double kEigenTolerance = 1e-8;

// Smallest eigenvalue of the discrete form (S - M W) u = lambda M u by shifted
// inverse iteration. Throws a Solver error when the residual does not drop
// below tolerance.
SpectralEstimate lambda1_estimate(const DiscreteForm& form, double tolerance = kEigenTolerance, int max_iterations = 400);
SpectralEstimate lambda1_estimate(const GaussianMeasure& measure, const Grid& grid, std::optional<double> k_cut,
                                  CutoffMode mode = CutoffMode::Coupled);

struct OptimalityProbe {
  double gamma = 0.0;
  int pole = 0;
  double coupling = 0.0;
  double i_gamma = 0.0;
  double i_gamma_minus_1 = 0.0;
  double moment_ratio = 0.0;        // I(gamma-1) / I(gamma)
  double ratio_lower_bound = 0.0;   // closed form
  double r_bound = 0.0;             // (gamma^2 - c) I(gamma-1) / I(gamma)
  double r_bound_closed = 0.0;      // (gamma^2 - c) * ratio_lower_bound when gamma^2 < c, else r_bound
  double resolution = 0.0;
};

// Rayleigh quotient bound for phi = |x - a_i|^gamma with the single-pole
// potential, from exact moment integrals. Requires gamma in (1 - N/2, 0).
OptimalityProbe optimality_probe(double gamma, int pole, const GaussianMeasure& measure, const Grid& grid,
                                 double coupling);

}  // namespace ouh
