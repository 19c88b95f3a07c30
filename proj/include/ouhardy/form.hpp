#pragma once

#include <optional>
#include <vector>

#include <Eigen/Sparse>

#include "ouhardy/measure.hpp"

namespace ouh {

using SparseMatrix = Eigen::SparseMatrix<double>;

// c * sum_i 1/|x - a_i|^2. Throws a Singularity error at a pole.
double potential(const Vec& x, const ProblemConfig& cfg);
double potential(const Vec& x, const std::vector<Vec>& poles, double coupling);

// Cut-off value min(V, cap) with cap = c*k (coupled) or k (absolute).
double cutoff_cap(double coupling, double k_cut, CutoffMode mode);

// Lattice version of the weighted form
//   a(u, u) = \int |grad u|^2 dmu - \int W u^2 dmu,  W = min(V, cap),
// on grid functions vanishing on the box faces. Edges carry mu at their
// midpoint, so the stiffness matrix is symmetric and the operator
//   (Op u)_i = (1 / (mu_i h^2)) sum_j mu_ij (u_j - u_i) + W_i u_i
// approximates L + W with an M-matrix structure.
//
// Without a cut-off a pole sitting on a node has V = infinity there and the
// node is treated as a Dirichlet node.
class DiscreteForm {
 public:
  DiscreteForm(const GaussianMeasure& measure, const Grid& grid, std::optional<double> k_cut,
               CutoffMode mode = CutoffMode::Coupled);

  const Grid& grid() const { return grid_; }
  std::optional<double> k_cut() const { return k_cut_; }
  double coupling() const { return coupling_; }

  Index unknowns() const { return static_cast<Index>(nodes_.size()); }
  const std::vector<Index>& nodes() const { return nodes_; }
  // Unknown index of a flat grid node, or -1.
  Index local(Index flat) const { return local_[static_cast<std::size_t>(flat)]; }

  const SparseMatrix& stiffness() const { return stiffness_; }  // sum over edges of mu_ij h^{N-2} (u_j - u_i)^2
  const Eigen::VectorXd& mass() const { return mass_; }          // mu_i h^N
  const Eigen::VectorXd& potential() const { return potential_; }
  double max_potential() const { return max_potential_; }
  int excluded_poles() const { return excluded_poles_; }

  // S - diag(M W): the matrix of a(u, u).
  SparseMatrix form_matrix() const;

  double dirichlet(const Eigen::VectorXd& u) const;
  double potential_energy(const Eigen::VectorXd& u) const;
  double mass_norm2(const Eigen::VectorXd& u) const;

  // M^{-1}(-S + M W) u.
  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;

  Eigen::VectorXd restrict(const ScalarField& f) const;
  ScalarField extend(const Eigen::VectorXd& u) const;

 private:
  Grid grid_;
  std::optional<double> k_cut_;
  double coupling_ = 0.0;
  std::vector<Index> nodes_;
  std::vector<Index> local_;
  SparseMatrix stiffness_;
  Eigen::VectorXd mass_;
  Eigen::VectorXd potential_;
  double max_potential_ = 0.0;
  int excluded_poles_ = 0;
};

}  // namespace ouh
