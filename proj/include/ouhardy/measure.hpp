#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ouhardy/config.hpp"
#include "ouhardy/grid.hpp"

namespace ouh {

// Surface area of the unit sphere in R^N.
double sphere_area(int dimension);

// \int_{R^N} |x|^{2 beta} e^{-|x|^2/2} dx in closed form; requires beta + N/2 > 0.
double gamma_moment(double beta, int dimension);

// Weight-equivalence constants for pole i. The pair sum runs over j != i only.
struct EquivalenceBounds {
  int pole = 0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double alpha1_tilde = 0.0;  // alpha1 (n+1)/2
  double alpha2_tilde = 0.0;  // alpha2 (2n-1)
  double pair_sum = 0.0;      // sum_{j != i} |a_i - a_j|^2
  double c1 = 1.0;            // exp(-alpha2 * pair_sum)
  double c2 = 1.0;            // exp(alpha1 * pair_sum / 2)
};

// The Gaussian invariant measure
//   mu(x) = C exp(-1/2 sum_i <A(x - a_i), x - a_i>)
//         = C exp(-D/2) exp(-(n/2) <A(x - abar), x - abar>).
class GaussianMeasure {
 public:
  explicit GaussianMeasure(const ProblemConfig& cfg);

  const ProblemConfig& config() const { return cfg_; }
  const Geometry& geometry() const { return geometry_; }
  int dimension() const { return geometry_.dimension; }
  int pole_count() const { return geometry_.pole_count; }
  const Vec& barycenter() const { return geometry_.barycenter; }
  const Mat& precision() const { return precision_; }  // nA
  double offset() const { return offset_; }            // D

  // Closed-form normalization by completing the square.
  double normalization() const { return normalization_; }

  // -1/2 sum_i <A(x - a_i), x - a_i>, the log of the unnormalized weight.
  double log_weight(const Vec& x) const;
  double weight(const Vec& x) const;
  double density(const Vec& x) const;

  // grad(mu)/mu = -sum_j A(x - a_j).
  Vec drift(const Vec& x) const;
  // 1/4 |grad mu / mu|^2 - 1/2 (Laplacian mu)/mu = (n/2) Tr A - 1/4 |sum_j A(x - a_j)|^2.
  double drift_gap(const Vec& x) const;

  // i.i.d. draws from N(abar, (nA)^{-1}); deterministic for a given seed.
  std::vector<Vec> sample(Index count, std::uint64_t seed) const;

  EquivalenceBounds equivalence_bounds(int pole) const;

  // Node values of the density on a grid.
  Eigen::VectorXd density_on(const Grid& grid) const;

 private:
  ProblemConfig cfg_;
  Geometry geometry_;
  Mat precision_;
  Mat sample_factor_;  // L^{-T} with nA = L L^T
  double offset_ = 0.0;
  double normalization_ = 0.0;
};

// 1 / (tensor quadrature of the unnormalized weight).
double normalization_by_quadrature(const GaussianMeasure& measure, const Grid& grid);

struct NormalizationCheck {
  double closed_form = 0.0;
  double quadrature = 0.0;
  double relative_error = 0.0;
};

// Throws a Consistency error when the two routes disagree beyond tolerance.
NormalizationCheck check_normalization(const GaussianMeasure& measure, const Grid& grid, double tolerance = 1e-4);

// --- integrals against mu -------------------------------------------------

// \int f dmu by the mu-weighted trapezoidal rule. Non-finite node values are
// rejected as input errors; singular integrands go through singular_quadrature.
double weighted_integral(const ScalarField& f, const GaussianMeasure& measure);
double weighted_integral(const std::function<double(const Vec&)>& f, const GaussianMeasure& measure,
                         const Grid& grid);

struct MonteCarloEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  Index samples = 0;
};

MonteCarloEstimate weighted_integral_mc(const std::function<double(const Vec&)>& f, const GaussianMeasure& measure,
                                        Index samples, std::uint64_t seed);

enum class SingularCorrection { None, Radial, Subtracted };

struct SingularOptions {
  double excision_factor = 2.0;   // epsilon = excision_factor * h
  double reference_width = 0.0;   // 0 picks a width from the distance to the box faces
};

// Estimates of \int_box f(x) |x - a|^{2 beta} dx for f smooth (f sampled on the grid).
//   raw        - lattice sum with the ball B(a, eps) excised
//   radial     - raw + f(a) sigma_N eps^{2beta+N} / (2beta+N)
//   subtracted - lattice sum of (f - f(a) g)|x-a|^{2beta} over all nodes but a,
//                plus f(a) times the exact integral of g |x-a|^{2beta},
//                g = exp(-|x-a|^2 / (2 s^2))
struct SingularIntegral {
  double raw = 0.0;
  double radial = 0.0;
  double subtracted = 0.0;
  double excision_radius = 0.0;
  double pole_value = 0.0;

  double value(SingularCorrection c) const {
    return c == SingularCorrection::None ? raw : (c == SingularCorrection::Radial ? radial : subtracted);
  }
};

SingularIntegral singular_quadrature(const ScalarField& smooth, const Vec& pole, double beta,
                                     const SingularOptions& options = {});

// --- moments and weight-equivalence estimates ------------------------------

struct MomentReport {
  double beta = 0.0;
  int pole = 0;
  double value = 0.0;      // I(beta) with the subtracted correction
  double raw = 0.0;        // excised lattice sum only
  double radial = 0.0;     // excised sum plus radial correction
  double lower = 0.0;
  double upper = 0.0;
  double sigma_n = 0.0;
  double resolution = 0.0; // grid spacing used
};

// I(beta) = \int |x - a_i|^{2 beta} exp(-sum_j |A^{1/2}(x - a_j)|^2 / 2) dx on the
// grid, together with the closed-form bracket. Throws when the bracket fails.
MomentReport moment_bounds(double beta, int pole, const GaussianMeasure& measure, const Grid& grid);

// Closed-form bracket only (no quadrature).
void moment_bracket(double beta, int pole, const GaussianMeasure& measure, double& lower, double& upper);

// Monte Carlo estimate of I(beta) = E_mu[|x - a_i|^{2 beta}] / C.
MonteCarloEstimate moment_monte_carlo(double beta, int pole, const GaussianMeasure& measure, Index samples,
                                      std::uint64_t seed);

struct EquivalenceReport {
  int pole = 0;
  EquivalenceBounds bounds;
  Index points = 0;
  double min_lower_margin = 0.0;  // in log space: log(middle) - log(lower)
  double min_upper_margin = 0.0;  // log(upper) - log(middle)
};

// Checks C1 e^{-a2~ |x-a_i|^2/2} <= e^{-sum_j |A^{1/2}(x-a_j)|^2/2} <= C2 e^{-a1~ |x-a_i|^2/2}.
EquivalenceReport equivalence_check(int pole, const GaussianMeasure& measure, const std::vector<Vec>& points);

struct AppendixReport {
  int pole = 0;
  double lower = 0.0;
  double middle = 0.0;
  double upper = 0.0;
  double margin = 0.0;  // min(middle - lower, upper - middle)
};

// -sum_{j!=i}|a_i-a_j|^2 + (n+1)/2 |x-a_i|^2 <= sum_j |x-a_j|^2 <= (2n-1)|x-a_i|^2 + 2 sum_{j!=i}|a_i-a_j|^2.
AppendixReport appendix_check(int pole, const Vec& x, const std::vector<Vec>& poles);

inline constexpr double kInequalityTolerance = 1e-12;

}  // namespace ouh
