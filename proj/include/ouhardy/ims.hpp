#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ouhardy/hardy.hpp"

namespace ouh {

enum class Profile { Cosine, Smoothstep };

Profile parse_profile(const std::string& name);
std::string to_string(Profile p);

// J_i(x) = cos(theta(t)), t = (|x - a_i| - rho r0) / ((1 - rho) r0) clamped to
// [0, 1], theta = (pi/2) g(t) with g(t) = t (cosine) or 3t^2 - 2t^3
// (smoothstep). J_{n+1} = sqrt(1 - sum J_i^2). Gradients are analytic.
class PartitionOfUnity {
 public:
  PartitionOfUnity(const ProblemConfig& cfg, double rho = 0.5, Profile profile = Profile::Cosine);

  int members() const { return static_cast<int>(poles_.size()) + 1; }
  int pole_count() const { return static_cast<int>(poles_.size()); }
  const std::vector<Vec>& poles() const { return poles_; }
  double rho() const { return rho_; }
  double r0() const { return r0_; }
  Profile profile() const { return profile_; }
  double plateau_radius() const { return rho_ * r0_; }
  double support_radius() const { return r0_; }

  // Index of the pole whose support contains x, or -1 (far region Gamma).
  int region(const Vec& x) const;

  double value(int member, const Vec& x) const;
  Vec gradient(int member, const Vec& x) const;
  // |grad J_i|^2 / (1 - J_i^2) for i < n (0 on the plateau and outside the support).
  double ratio(int member, const Vec& x) const;
  // Sup of the ratio over the annulus in closed form: (pi/2)^2 max g'^2 / ((1-rho) r0)^2.
  double ratio_bound() const;

  // Distance from x to the nearest radius where the profile's derivative has a kink.
  double kink_distance(const Vec& x) const;

 private:
  double theta(double r, double& dtheta) const;

  std::vector<Vec> poles_;
  double r0_ = 0.0;
  double rho_ = 0.5;
  Profile profile_ = Profile::Cosine;
};

PartitionOfUnity build_partition(const ProblemConfig& cfg, double rho = 0.5, Profile profile = Profile::Cosine);

struct PartitionCheck {
  double sum_squares = 0.0;      // max |sum J_i^2 - 1|                       (b)
  double orthogonality = 0.0;    // max_alpha |sum J_i d_alpha J_i|            (a)
  double gradient_sum = 0.0;     // max |sum |grad J_i|^2 - sum |grad J_i|^2/(1-J_i^2)|, relative  (d)
  double ratio_max = 0.0;        // max F over the annuli
  double ratio_bound = 0.0;      // closed form
  double finite_difference = 0.0;// max |analytic - central difference| of grad J_i on the annuli
  double fd_step = 0.0;
  bool disjoint = true;
  Index points = 0;
};

PartitionCheck check_partition(const PartitionOfUnity& p, const Grid& grid);

struct KHatReport {
  double k_hat = 0.0;
  bool below_pi2 = false;
  double gradient_part = 0.0;  // r0^2 max of the gradient ratio alone
  Vec argmax;
};

// k = r0^2 max_Omega [sum_{i,j} |grad J|^2 / (1 - J^2) + c J_3^2 V_2] - 2c over
// every pair of poles (the single pole when n = 1).
KHatReport lemma3_bound(const PartitionOfUnity& p, const Grid& grid, double coupling);

// Collar excluded around the kink radii in localization integrals.
double kink_collar(const Grid& grid);

struct IdentityReport {
  double lhs = 0.0;                // \int (|grad phi|^2 - V phi^2) dmu
  double pieces = 0.0;             // sum_i \int (|grad(J_i phi)|^2 - V (J_i phi)^2) dmu
  double gradient_term = 0.0;      // \int sum_i |grad J_i|^2 phi^2 dmu
  double rhs = 0.0;                // pieces - gradient_term
  double potential_residual = 0.0; // sum of the V parts minus the V part of the lhs
  double residual = 0.0;           // |lhs - rhs|
  double resolution = 0.0;
};

// Both sides of the localization identity on one grid (collar excluded).
IdentityReport ims_identity(const ScalarField& phi, const GaussianMeasure& measure, const PartitionOfUnity& p,
                            double coupling, double collar);

struct IdentityCheck {
  IdentityReport coarse;
  IdentityReport fine;
  double error_estimate = 0.0;  // refinement change of lhs plus that of rhs
  double observed_order = 0.0;  // log2 of the residual ratio
  bool within_tolerance = false;
};

// Identity on grid and refinement with the coarse collar on both; throws an IdentityViolation when the coarse
// residual exceeds five times the error estimate.
IdentityCheck ims_identity_check(const std::function<double(const Vec&)>& phi, const GaussianMeasure& measure,
                                 const PartitionOfUnity& p, const Grid& grid, double coupling);

struct FormReport {
  double q = 0.0;                  // Q[phi]
  std::vector<double> q_pieces;    // Q[J_i phi], i < n
  double remainder = 0.0;          // R_n
  double gradient_term = 0.0;      // \int sum_{i<=n+1} |grad J_i|^2 phi^2 dmu
  double mass = 0.0;               // \int phi^2 dmu
  double mass_far = 0.0;           // \int_Gamma phi^2 dmu
  std::vector<double> mass_in;     // \int_{Omega_i} phi^2 dmu
  std::vector<double> mass_local;  // \int_{Omega_i} J_i^2 phi^2 dmu
  double far_potential = 0.0;      // c \int_Gamma V phi^2 dmu
  double complement_potential = 0.0;  // c \int V (1 - sum J_i^2) phi^2 dmu
  double ratio_term = 0.0;         // sum_i \int F_i phi^2 dmu
  double rn_weight = 0.0;          // sum_i \int_{Omega_i} [(k+2c)/r0^2 + (n-2)c(1-J_i^2)/r0^2] phi^2 dmu
  double resolution = 0.0;
};

FormReport q_form(const ScalarField& phi, const GaussianMeasure& measure, const PartitionOfUnity& p, double coupling,
                  double k_hat);

struct DisplayCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  bool holds = false;
};

struct ChainReport {
  FormReport coarse;
  FormReport fine;
  double k_hat = 0.0;
  double constant_internal = 0.0;  // (k + (n+1)c)/r0^2 + Tr A / 2
  double constant_K = 0.0;        // (k + (n+1)c)/r0^2 + (n/2) Tr A
  std::vector<DisplayCheck> displays;
  bool ok() const;
  const DisplayCheck* first_failure() const;
};

// Evaluates the lower-bound chain for Q[phi] on grid and refinement; every
// display is checked on the refined level with a tolerance built from the
// refinement differences of its two sides.
ChainReport chain_bound(const std::function<double(const Vec&)>& phi, const GaussianMeasure& measure,
                        const PartitionOfUnity& p, const Grid& grid, double coupling, double k_hat);

}  // namespace ouh
