#include "ouhardy/grid.hpp"

#include <algorithm>
#include <cmath>

namespace ouh {

Grid::Grid(Vec origin, double spacing, int points_per_axis)
    : origin_(std::move(origin)), h_(spacing), m_(points_per_axis) {
  const int N = dimension();
  if (N < 1 || N > kMaxDimension) throw Error(ErrorKind::Dimension, "grid dimension must be in [1, 6]");
  if (m_ < 3) throw Error(ErrorKind::Resolution, "grid needs at least 3 points per axis");
  if (!(h_ > 0.0)) throw Error(ErrorKind::Resolution, "grid spacing must be positive");
  size_ = 1;
  for (int a = N - 1; a >= 0; --a) {
    strides_[a] = size_;
    size_ *= m_;
  }
}

Grid Grid::centered(const Vec& center, double radius, int points_per_axis) {
  if (!(radius > 0.0)) throw Error(ErrorKind::Resolution, "grid radius must be positive");
  if (points_per_axis < 3) throw Error(ErrorKind::Resolution, "grid needs at least 3 points per axis");
  const double h = 2.0 * radius / (points_per_axis - 1);
  return Grid(center.array() - radius, h, points_per_axis);
}

double Grid::cell_volume() const { return std::pow(h_, dimension()); }

Vec Grid::node(Index flat) const {
  const int N = dimension();
  Vec x(N);
  for (int a = 0; a < N; ++a) x[a] = coordinate(a, axis_index(flat, a));
  return x;
}

bool Grid::on_boundary(Index flat) const {
  for (int a = 0; a < dimension(); ++a) {
    const int i = axis_index(flat, a);
    if (i == 0 || i == m_ - 1) return true;
  }
  return false;
}

bool Grid::contains_strictly(const Vec& x) const {
  for (int a = 0; a < dimension(); ++a)
    if (!(x[a] > origin_[a] && x[a] < coordinate(a, m_ - 1))) return false;
  return true;
}

std::optional<Index> Grid::node_at(const Vec& x, double tol) const {
  Index flat = 0;
  for (int a = 0; a < dimension(); ++a) {
    const double t = (x[a] - origin_[a]) / h_;
    const double r = std::round(t);
    if (std::abs(t - r) * h_ > tol || r < 0 || r > m_ - 1) return std::nullopt;
    flat += static_cast<Index>(r) * strides_[a];
  }
  return flat;
}

Grid Grid::refined() const { return Grid(origin_, h_ / 2.0, 2 * m_ - 1); }

void Grid::for_each_node(const std::function<void(Index, const Vec&)>& f) const {
  const int N = dimension();
  std::array<int, kMaxDimension> idx{};
  Vec x = origin_;
  for (Index flat = 0; flat < size_; ++flat) {
    f(flat, x);
    for (int a = N - 1; a >= 0; --a) {
      if (++idx[a] < m_) {
        x[a] = coordinate(a, idx[a]);
        break;
      }
      idx[a] = 0;
      x[a] = origin_[a];
    }
  }
}

double default_radius(const Geometry& geometry) {
  return 4.0 * std::max(geometry.pole_spread, 1.0 / std::sqrt(geometry.alpha1));
}

namespace {

bool is_multiple(double d, double h) {
  const double t = d / h;
  return std::abs(t - std::round(t)) < 1e-9 * std::max(1.0, t);
}

}  // namespace

Grid make_grid(const ProblemConfig& cfg, const Geometry& geometry, int points_per_axis, double radius) {
  const int m = points_per_axis > 0 ? points_per_axis : cfg.grid.points_per_axis;
  const double r_target = radius > 0.0 ? radius : (cfg.grid.radius > 0.0 ? cfg.grid.radius : default_radius(geometry));
  if (m < 3) throw Error(ErrorKind::Resolution, "grid needs at least 3 points per axis");
  const int N = geometry.dimension;
  const Vec& center = geometry.barycenter;
  Grid plain = Grid::centered(center, r_target, m);
  for (const auto& a : cfg.poles)
    if (!plain.contains_strictly(a)) throw Error(ErrorKind::Geometry, "a pole lies outside the grid box");
  if (!cfg.grid.align_poles) return plain;

  const double h0 = plain.spacing();
  std::vector<double> diffs;
  for (int a = 0; a < N; ++a)
    for (const auto& p : cfg.poles) {
      const double d = std::abs(p[a] - cfg.poles.front()[a]);
      if (d > 1e-12) diffs.push_back(d);
    }

  double h = h0;
  if (!diffs.empty()) {
    const double dmin = *std::min_element(diffs.begin(), diffs.end());
    for (int j = std::max(1, static_cast<int>(std::ceil(dmin / h0 - 1e-9))); dmin / j >= h0 / 1.5; ++j) {
      const double cand = dmin / j;
      if (std::all_of(diffs.begin(), diffs.end(), [&](double d) { return is_multiple(d, cand); })) {
        h = cand;
        break;
      }
    }
  }
  const double r = 0.5 * h * (m - 1);
  Vec origin = center.array() - r;
  for (int a = 0; a < N; ++a) {
    const double t = (cfg.poles.front()[a] - origin[a]) / h;
    origin[a] += (t - std::round(t)) * h;
  }
  Grid aligned(origin, h, m);
  for (const auto& a : cfg.poles)
    if (!aligned.contains_strictly(a)) return plain;
  return aligned;
}

bool poles_on_nodes(const Grid& grid, const std::vector<Vec>& poles) {
  return std::all_of(poles.begin(), poles.end(),
                     [&](const Vec& a) { return grid.node_at(a, 1e-9 * std::max(1.0, grid.spacing())).has_value(); });
}

ScalarField sample(const Grid& grid, const std::function<double(const Vec&)>& f) {
  ScalarField out{grid, Eigen::VectorXd(grid.size()), 0.0};
  grid.for_each_node([&](Index i, const Vec& x) { out.values[i] = f(x); });
  return out;
}

VectorField gradient(const ScalarField& f) {
  const Grid& g = f.grid;
  const int N = g.dimension();
  const int m = g.points_per_axis();
  if (m < 3) throw Error(ErrorKind::Resolution, "gradient needs at least 3 points per axis");
  const double inv2h = 1.0 / (2.0 * g.spacing());
  const auto& u = f.values;
  VectorField out{g, std::vector<Eigen::VectorXd>(N, Eigen::VectorXd(g.size()))};
  for (int a = 0; a < N; ++a) {
    const Index s = g.stride(a);
    auto& d = out.components[a];
    for (Index i = 0; i < g.size(); ++i) {
      const int k = g.axis_index(i, a);
      if (k == 0) d[i] = (-3.0 * u[i] + 4.0 * u[i + s] - u[i + 2 * s]) * inv2h;
      else if (k == m - 1) d[i] = (3.0 * u[i] - 4.0 * u[i - s] + u[i - 2 * s]) * inv2h;
      else d[i] = (u[i + s] - u[i - s]) * inv2h;
    }
  }
  return out;
}

Eigen::VectorXd quadrature_weights(const Grid& grid) {
  const int N = grid.dimension();
  const int m = grid.points_per_axis();
  Eigen::VectorXd w(grid.size());
  const double base = grid.cell_volume();
  for (Index i = 0; i < grid.size(); ++i) {
    double wi = base;
    for (int a = 0; a < N; ++a) {
      const int k = grid.axis_index(i, a);
      if (k == 0 || k == m - 1) wi *= 0.5;
    }
    w[i] = wi;
  }
  return w;
}

double tensor_quadrature(const Eigen::VectorXd& values, const Grid& grid) {
  if (values.size() != grid.size()) throw Error(ErrorKind::Input, "integrand size does not match the grid");
  const int N = grid.dimension();
  const int m = grid.points_per_axis();
  // Sum face-by-face: nodes with b boundary coordinates carry weight 2^-b.
  double sum = 0.0;
  for (Index i = 0; i < grid.size(); ++i) {
    int b = 0;
    for (int a = 0; a < N; ++a) {
      const int k = grid.axis_index(i, a);
      b += (k == 0 || k == m - 1);
    }
    sum += std::ldexp(values[i], -b);
  }
  return sum * grid.cell_volume();
}

double interpolate(const ScalarField& f, const Vec& x) {
  const Grid& g = f.grid;
  const int N = g.dimension();
  const int m = g.points_per_axis();
  std::array<int, kMaxDimension> base{};
  std::array<double, kMaxDimension> frac{};
  for (int a = 0; a < N; ++a) {
    const double t = (x[a] - g.origin()[a]) / g.spacing();
    if (t < -1e-9 || t > m - 1 + 1e-9) throw Error(ErrorKind::Input, "interpolation point outside the grid");
    int k = std::clamp(static_cast<int>(std::floor(t)), 0, m - 2);
    base[a] = k;
    frac[a] = std::clamp(t - k, 0.0, 1.0);
  }
  double acc = 0.0;
  for (int corner = 0; corner < (1 << N); ++corner) {
    double w = 1.0;
    Index flat = 0;
    for (int a = 0; a < N; ++a) {
      const int bit = (corner >> a) & 1;
      w *= bit ? frac[a] : 1.0 - frac[a];
      flat += static_cast<Index>(base[a] + bit) * g.stride(a);
    }
    if (w != 0.0) acc += w * f.values[flat];
  }
  return acc;
}

}  // namespace ouh
