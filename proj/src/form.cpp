#include "ouhardy/form.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ouh {

double potential(const Vec& x, const std::vector<Vec>& poles, double coupling) {
  double v = 0.0;
  for (const auto& a : poles) {
    const double r2 = (x - a).squaredNorm();
    if (r2 == 0.0) throw Error(ErrorKind::Singularity, "potential evaluated at a pole");
    v += 1.0 / r2;
  }
  return coupling * v;
}

double potential(const Vec& x, const ProblemConfig& cfg) { return potential(x, cfg.poles, cfg.coupling_c); }

double cutoff_cap(double coupling, double k_cut, CutoffMode mode) {
  return mode == CutoffMode::Coupled ? coupling * k_cut : k_cut;
}

DiscreteForm::DiscreteForm(const GaussianMeasure& measure, const Grid& grid, std::optional<double> k_cut,
                           CutoffMode mode)
    : grid_(grid), k_cut_(k_cut), coupling_(measure.config().coupling_c) {
  const auto& cfg = measure.config();
  const int N = grid.dimension();
  if (N != measure.dimension()) throw Error(ErrorKind::Dimension, "grid and measure dimensions differ");
  if (k_cut && !(*k_cut > 0.0)) throw Error(ErrorKind::Input, "cut-off index must be positive");
  const double h = grid.spacing();
  const double cap = k_cut ? cutoff_cap(coupling_, *k_cut, mode) : std::numeric_limits<double>::infinity();
  const double pole_tol = 1e-9 * std::max(1.0, h);

  local_.assign(static_cast<std::size_t>(grid.size()), -1);
  std::vector<double> w;
  std::vector<double> mu;
  grid.for_each_node([&](Index i, const Vec& x) {
    if (grid.on_boundary(i)) return;
    double v = 0.0;
    bool at_pole = false;
    if (coupling_ != 0.0) {
      for (const auto& a : cfg.poles) {
        const double r2 = (x - a).squaredNorm();
        if (r2 <= pole_tol * pole_tol) at_pole = true;
        else v += 1.0 / r2;
      }
      v = at_pole ? std::numeric_limits<double>::infinity() : coupling_ * v;
    }
    const double wi = std::min(v, cap);
    if (!std::isfinite(wi)) {
      ++excluded_poles_;
      return;
    }
    local_[static_cast<std::size_t>(i)] = static_cast<Index>(nodes_.size());
    nodes_.push_back(i);
    w.push_back(wi);
    mu.push_back(measure.density(x));
  });

  const Index n = unknowns();
  mass_.resize(n);
  potential_.resize(n);
  const double vol = grid.cell_volume();
  const double edge_scale = std::pow(h, N - 2);
  for (Index k = 0; k < n; ++k) {
    mass_[k] = mu[static_cast<std::size_t>(k)] * vol;
    potential_[k] = w[static_cast<std::size_t>(k)];
  }
  max_potential_ = n > 0 ? potential_.maxCoeff() : 0.0;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * (2 * N + 1));
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Vec mid(N);
  for (Index k = 0; k < n; ++k) {
    const Index i = nodes_[static_cast<std::size_t>(k)];
    const Vec x = grid.node(i);
    for (int a = 0; a < N; ++a) {
      for (int sgn : {-1, 1}) {
        const Index j = i + sgn * grid.stride(a);
        mid = x;
        mid[a] += 0.5 * sgn * h;
        const double wij = measure.density(mid) * edge_scale;
        diag[k] += wij;
        const Index l = local(j);
        if (l > k) {
          trip.emplace_back(k, l, -wij);
          trip.emplace_back(l, k, -wij);
        }
      }
    }
  }
  for (Index k = 0; k < n; ++k) trip.emplace_back(k, k, diag[k]);
  stiffness_.resize(n, n);
  stiffness_.setFromTriplets(trip.begin(), trip.end());
  stiffness_.makeCompressed();
}

SparseMatrix DiscreteForm::form_matrix() const {
  SparseMatrix m = stiffness_;
  for (Index k = 0; k < unknowns(); ++k) m.coeffRef(k, k) -= mass_[k] * potential_[k];
  return m;
}

double DiscreteForm::dirichlet(const Eigen::VectorXd& u) const { return u.dot(stiffness_ * u); }

double DiscreteForm::potential_energy(const Eigen::VectorXd& u) const {
  return (mass_.array() * potential_.array() * u.array().square()).sum();
}

double DiscreteForm::mass_norm2(const Eigen::VectorXd& u) const { return (mass_.array() * u.array().square()).sum(); }

Eigen::VectorXd DiscreteForm::apply(const Eigen::VectorXd& u) const {
  Eigen::VectorXd out = -(stiffness_ * u);
  out.array() /= mass_.array();
  out.array() += potential_.array() * u.array();
  return out;
}

Eigen::VectorXd DiscreteForm::restrict(const ScalarField& f) const {
  if (f.values.size() != grid_.size()) throw Error(ErrorKind::Input, "field does not live on the form grid");
  Eigen::VectorXd u(unknowns());
  for (Index k = 0; k < unknowns(); ++k) u[k] = f.values[nodes_[static_cast<std::size_t>(k)]];
  return u;
}

ScalarField DiscreteForm::extend(const Eigen::VectorXd& u) const {
  ScalarField f{grid_, Eigen::VectorXd::Zero(grid_.size()), 0.0};
  for (Index k = 0; k < unknowns(); ++k) f.values[nodes_[static_cast<std::size_t>(k)]] = u[k];
  return f;
}

}  // namespace ouh
