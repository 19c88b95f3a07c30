#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ouhardy/config.hpp"

namespace ouh {

using Index = Eigen::Index;

inline constexpr int kMaxDimension = 6;

// Tensor lattice with m nodes per axis and uniform spacing h. Node (i_0..i_{N-1})
// sits at origin + h*i; the last axis varies fastest in the flat index.
class Grid {
 public:
  Grid() = default;
  Grid(Vec origin, double spacing, int points_per_axis);

  // Lattice on the box [center - R, center + R]^N.
  static Grid centered(const Vec& center, double radius, int points_per_axis);

  int dimension() const { return static_cast<int>(origin_.size()); }
  int points_per_axis() const { return m_; }
  double spacing() const { return h_; }
  Index size() const { return size_; }
  const Vec& origin() const { return origin_; }
  double radius() const { return 0.5 * h_ * (m_ - 1); }
  Vec center() const { return origin_.array() + radius(); }
  double cell_volume() const;

  Index stride(int axis) const { return strides_[axis]; }
  double coordinate(int axis, int i) const { return origin_[axis] + h_ * i; }
  int axis_index(Index flat, int axis) const { return static_cast<int>((flat / strides_[axis]) % m_); }
  Vec node(Index flat) const;
  bool on_boundary(Index flat) const;
  bool contains_strictly(const Vec& x) const;

  // Flat index of the node within tol of x, if any.
  std::optional<Index> node_at(const Vec& x, double tol = 1e-9) const;

  // Same box, spacing halved (2m-1 nodes per axis): every coarse node survives.
  Grid refined() const;

  // Calls f(flat, x) for every node in flat order.
  void for_each_node(const std::function<void(Index, const Vec&)>& f) const;

 private:
  Vec origin_;
  double h_ = 0.0;
  int m_ = 0;
  Index size_ = 0;
  std::array<Index, kMaxDimension> strides_{};
};

double default_radius(const Geometry& geometry);

// Grid for a configuration: centered at the pole barycenter with the default
// (or configured) radius. With alignment enabled the spacing is reduced by at
// most a third and the lattice shifted by at most h/2 per axis so that the poles
// land on nodes; poles that cannot all be aligned leave only the first aligned.
Grid make_grid(const ProblemConfig& cfg, const Geometry& geometry, int points_per_axis = 0, double radius = 0.0);

// True when every pole coincides with a lattice node.
bool poles_on_nodes(const Grid& grid, const std::vector<Vec>& poles);

struct ScalarField {
  Grid grid;
  Eigen::VectorXd values;
  // Non-zero for fields that are singular at the poles: the radius of the
  // excluded ball around each pole.
  double excluded_radius = 0.0;

  bool singular() const { return excluded_radius > 0.0; }
};

struct VectorField {
  Grid grid;
  std::vector<Eigen::VectorXd> components;
};

ScalarField sample(const Grid& grid, const std::function<double(const Vec&)>& f);

// Central differences in the interior, second-order one-sided differences on
// the box faces.
VectorField gradient(const ScalarField& f);

// Per-axis trapezoidal weights (h/2 at the ends, h elsewhere) multiplied out.
double tensor_quadrature(const Eigen::VectorXd& values, const Grid& grid);

// The multiplied-out trapezoidal weight of every node.
Eigen::VectorXd quadrature_weights(const Grid& grid);

// Multilinear interpolation of node values at x (x must lie in the box).
double interpolate(const ScalarField& f, const Vec& x);

}  // namespace ouh
