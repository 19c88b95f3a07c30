#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ouhardy/hardy.hpp"

namespace ouh {

// L + min(V, cap) on the interior nodes with homogeneous Dirichlet data on the
// box faces (see DiscreteForm for the stencil).
struct DiscreteOperator {
  DiscreteForm form;
  // Implicit Euler keeps the M-matrix structure (and strict diagonal
  // dominance) for dt below this value.
  double positivity_threshold = 0.0;
  double rate_constant = 0.0;     // K of the weighted Hardy inequality
  bool within_hypothesis = true;  // c <= c0
};

DiscreteOperator assemble(const GaussianMeasure& measure, const Grid& grid, std::optional<double> k_cut,
                          CutoffMode mode = CutoffMode::Coupled);

// Generator without the potential: -M^{-1} S u.
Eigen::VectorXd apply_generator(const DiscreteOperator& op, const Eigen::VectorXd& u);

// |\int grad u . grad v dmu + sum_i M_i (L_h u)_i v_i| with the gradient
// integral taken by central differences and the trapezoidal rule.
double integration_by_parts_defect(const DiscreteOperator& op, const ScalarField& u, const ScalarField& v);

// One implicit Euler step (M + dt (S - M W)) u+ = M u, solved by conjugate
// gradients to relative residual 1e-13. The system matrix is built once.
class ImplicitEuler {
 public:
  ImplicitEuler(const DiscreteOperator& op, double dt);
  Eigen::VectorXd advance(const Eigen::VectorXd& u) const;
  double dt() const { return dt_; }

 private:
  const DiscreteOperator* op_;
  double dt_;
  SparseMatrix system_;
};

ScalarField step(const ScalarField& u, const DiscreteOperator& op, double dt);

enum class Verdict { Bounded, Growing, Inconclusive };
std::string to_string(Verdict v);

struct EvolutionReport {
  std::vector<double> times;
  std::vector<double> log_norms;   // log ||u(t)||_{L^2_mu}
  std::vector<double> min_values;  // min_x u(t) / ||u(t)||_inf
  double omega_hat = 0.0;
  double m_hat = 1.0;
  std::optional<double> k_cut;
  bool positive = true;
  double rate_bound = 0.0;         // K + tolerance
  bool rate_ok = true;
  Verdict verdict = Verdict::Inconclusive;
  // u(T) = exp(final_log_scale) * final_shape.
  Eigen::VectorXd final_shape;
  double final_log_scale = 0.0;

  double norm(std::size_t i) const;
};

inline constexpr double kRateTolerance = 0.5;
inline constexpr double kPositivityTolerance = 1e-10;

// u0 = bump at the barycenter scaled to unit L^2_mu norm.
ScalarField default_initial_data(const GaussianMeasure& measure, const Grid& grid);

// Implicit Euler from u0 to T. The state is renormalized after every step and
// its scale tracked in log form, so overflow never decides anything. Throws a
// PositivityViolation if an iterate goes below -1e-10 relative to its sup.
EvolutionReport evolve(const ScalarField& u0, const DiscreteOperator& op, double dt, double T);

struct ScanEntry {
  double k_cut = 0.0;
  double log_final_norm = 0.0;
  double ratio = 0.0;  // to the previous entry (0 for the first)
  bool positive = true;
  double omega_hat = 0.0;
};

struct ScanReport {
  std::vector<ScanEntry> entries;
  double dt = 0.0;
  double coupling = 0.0;
  double max_pointwise_violation = 0.0;  // max of u_k - u_{k+1}, relative to max(1, sup u_{k+1})
  bool pointwise_monotone = true;
  bool norms_nondecreasing = true;
  Verdict verdict = Verdict::Inconclusive;
  std::string hint;
};

inline constexpr double kMonotonicityTolerance = 1e-8;
inline constexpr double kBlowupDelta = 0.05;

// Evolves u0 for every cut-off with a shared dt = min(dt, 0.9 / max_k sup W_k)
// and compares the final states. Throws a SchemeConsistency error when the
// pointwise ordering fails beyond 1e-8.
ScanReport monotonicity_scan(const ScalarField& u0, const GaussianMeasure& measure, const Grid& grid,
                             const std::vector<double>& k_cuts, double dt, double T,
                             CutoffMode mode = CutoffMode::Coupled);

// Verdict from the ratios of consecutive final norms: growing when the last
// three exceed 1 + delta and do not decrease; bounded when every ratio is
// within delta of 1.
Verdict classify_ratios(const std::vector<double>& ratios, double delta = kBlowupDelta);

ScanReport blowup_scan(const ScalarField& u0, const GaussianMeasure& measure, const Grid& grid,
                       const std::vector<double>& k_cuts, double dt, double T, CutoffMode mode = CutoffMode::Coupled,
                       double delta = kBlowupDelta);

struct CoercivityReport {
  int probes = 0;
  double min_quotient = 0.0;     // min a_c(u,u) / ||u||^2_{L^2_mu}
  double min_h1_quotient = 0.0;  // min a_c(u,u) / (||grad u||^2 + ||u||^2)
  double bound = 0.0;            // -K
  bool ok = true;
  int worst_probe = -1;
};

// Discrete a_c(u,u) over random bump probes (the form without cut-off).
CoercivityReport coercivity_check(const GaussianMeasure& measure, const Grid& grid, int probes, std::uint64_t seed);
CoercivityReport coercivity_check(const DiscreteForm& form, const std::vector<Eigen::VectorXd>& probes, double K);

}  // namespace ouh
