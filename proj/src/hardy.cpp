#include "ouhardy/hardy.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/IterativeLinearSolvers>

namespace ouh {

HardyConstants hardy_constants(const ProblemConfig& cfg) {
  const auto g = derive_geometry(cfg);
  HardyConstants h;
  h.coupling = cfg.coupling_c;
  h.k = cfg.ims_k;
  h.r0 = g.r0;
  h.c0 = g.c0;
  const double n = g.pole_count;
  h.K_improved = 0.5 * n * g.trace_a;
  // One pole: r0 is infinite and the localization term drops out.
  h.K = (std::isfinite(g.r0) ? (h.k + (n + 1) * h.coupling) / (g.r0 * g.r0) : 0.0) + h.K_improved;
  return h;
}

double Bump::support_radius() const { return 4.0 / std::sqrt(sharpness); }

double Bump::operator()(const Vec& x) const {
  const double r2 = (x - center).squaredNorm();
  if (r2 * sharpness >= 16.0) return 0.0;
  return amplitude * std::exp(-sharpness * r2);
}

std::vector<Bump> bump_suite(const ProblemConfig& cfg, const Grid& grid, int count, std::uint64_t seed) {
  const auto geo = derive_geometry(cfg);
  const int N = cfg.dimension;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec> anchors = cfg.poles;
  anchors.push_back(geo.barycenter);
  const double lo_face = 2.0 * grid.spacing();
  std::vector<Bump> out;
  while (static_cast<int>(out.size()) < count) {
    const Vec& anchor = anchors[static_cast<std::size_t>(rng() % anchors.size())];
    Bump b;
    b.center = anchor;
    for (int a = 0; a < N; ++a) b.center[a] += 1.2 * (unit(rng) - 0.5);
    double room = std::numeric_limits<double>::infinity();
    for (int a = 0; a < N; ++a)
      room = std::min({room, b.center[a] - grid.origin()[a], grid.coordinate(a, grid.points_per_axis() - 1) - b.center[a]});
    room -= lo_face;
    if (room <= 0.0) continue;
    const double s_min = 16.0 / (room * room);
    b.sharpness = std::max(1.0 + 7.0 * unit(rng), s_min);
    if (b.sharpness > 12.0) continue;
    b.amplitude = 0.5 + 1.5 * unit(rng);
    out.push_back(b);
  }
  return out;
}

double inverse_square_integral(const ScalarField& f, const std::vector<Vec>& poles) {
  const Grid& g = f.grid;
  double total = 0.0;
  for (const auto& a : poles) {
    if (g.contains_strictly(a)) {
      total += singular_quadrature(f, a, -1.0).subtracted;
    } else {
      const Eigen::VectorXd w = quadrature_weights(g);
      g.for_each_node([&](Index i, const Vec& x) { total += w[i] * f.values[i] / (x - a).squaredNorm(); });
    }
  }
  return total;
}

HardyReport hardy_terms(const ScalarField& phi, const GaussianMeasure& measure, double coupling, double constant) {
  const Grid& g = phi.grid;
  if (!phi.values.allFinite()) throw Error(ErrorKind::Input, "test function has non-finite node values");
  const double peak = phi.values.cwiseAbs().maxCoeff();
  if (peak == 0.0) throw Error(ErrorKind::DegenerateInput, "test function vanishes identically");
  double trace = 0.0;
  for (Index i = 0; i < g.size(); ++i)
    if (g.on_boundary(i)) trace = std::max(trace, std::abs(phi.values[i]));
  if (trace > 1e-10) throw Error(ErrorKind::Input, "test function does not vanish on the box faces");

  const Eigen::VectorXd mu = measure.density_on(g);
  const auto grad = gradient(phi);
  Eigen::VectorXd g2 = Eigen::VectorXd::Zero(g.size());
  for (const auto& c : grad.components) g2.array() += c.array().square();

  HardyReport r;
  r.coupling = coupling;
  r.constant = constant;
  r.resolution = g.spacing();
  r.dirichlet = tensor_quadrature(g2.cwiseProduct(mu), g);
  const Eigen::VectorXd phi2mu = phi.values.array().square() * mu.array();
  r.mass = tensor_quadrature(phi2mu, g);
  r.lhs = coupling * inverse_square_integral(ScalarField{g, phi2mu, 0.0}, measure.config().poles);
  r.rhs = r.dirichlet + constant * r.mass;
  r.margin = r.rhs - r.lhs;
  return r;
}

HardyReport hardy_report(const ScalarField& phi, const GaussianMeasure& measure) {
  const auto k = hardy_constants(measure.config());
  return hardy_terms(phi, measure, k.coupling, k.K);
}

HardyReport improved_report(const ScalarField& phi, const GaussianMeasure& measure) {
  const auto k = hardy_constants(measure.config());
  return hardy_terms(phi, measure, k.c0 / measure.pole_count(), k.K_improved);
}

HardyCheck hardy_check(const std::function<double(const Vec&)>& phi, const GaussianMeasure& measure, const Grid& grid,
                       HardyVariant variant) {
  auto eval = [&](const Grid& g) {
    const auto f = sample(g, phi);
    return variant == HardyVariant::Standard ? hardy_report(f, measure) : improved_report(f, measure);
  };
  HardyCheck c;
  c.coarse = eval(grid);
  c.fine = eval(grid.refined());
  c.error_bar = std::abs(c.coarse.margin - c.fine.margin);
  return c;
}

namespace {

using Cg = Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>>;

}  // namespace

SpectralEstimate lambda1_estimate(const DiscreteForm& form, double tolerance, int max_iterations) {
  const Index n = form.unknowns();
  if (n == 0) throw Error(ErrorKind::Resolution, "grid has no interior unknowns");
  const SparseMatrix A = form.form_matrix();
  const Eigen::VectorXd& M = form.mass();

  auto m_norm = [&](const Eigen::VectorXd& v) { return std::sqrt((M.array() * v.array().square()).sum()); };
  auto residual = [&](const Eigen::VectorXd& y, double lambda) {
    const Eigen::VectorXd r = A * y - lambda * M.cwiseProduct(y);
    return std::sqrt((r.array().square() / M.array()).sum());
  };

  // Any sigma below -max W keeps A - sigma M positive definite.
  double sigma = -form.max_potential() - 1.0;
  Eigen::VectorXd y = Eigen::VectorXd::Ones(n);
  y /= m_norm(y);
  double lambda = y.dot(A * y);
  double res = residual(y, lambda);

  Cg cg;
  cg.setTolerance(1e-13);
  cg.setMaxIterations(static_cast<Index>(std::max<Index>(2000, 4 * n)));
  double factored_sigma = std::numeric_limits<double>::quiet_NaN();
  SparseMatrix shifted;

  int it = 0;
  for (; it < max_iterations && res > tolerance; ++it) {
    if (sigma != factored_sigma) {
      shifted = A;
      for (Index k = 0; k < n; ++k) shifted.coeffRef(k, k) -= sigma * M[k];
      cg.compute(shifted);
      factored_sigma = sigma;
    }
    Eigen::VectorXd next = cg.solveWithGuess(M.cwiseProduct(y), y);
    if (cg.info() != Eigen::Success && cg.error() > 1e-8) throw Error(ErrorKind::Solver, "inner solve of inverse iteration did not converge");
    next /= m_norm(next);
    if (next.dot(M.cwiseProduct(y)) < 0.0) next = -next;
    y = next;
    lambda = y.dot(A * y);
    res = residual(y, lambda);
    // Move the shift towards lambda1 while keeping it below: an eigenvalue lies
    // within res of the Rayleigh quotient.
    const double gap = std::max(2.0 * res, 1e-6 * (1.0 + std::abs(lambda)));
    if (res < 1e-2 * (1.0 + std::abs(lambda)) && lambda - gap > sigma) sigma = lambda - gap;
  }
  if (!(res <= tolerance)) throw Error(ErrorKind::Solver, "inverse iteration did not reach the residual tolerance");

  SpectralEstimate e;
  e.value = lambda;
  e.k_cut = form.k_cut();
  e.iterations = it;
  e.residual = res;
  // Fix the sign so that the larger part of the mass is positive.
  if (M.cwiseProduct(y).sum() < 0.0) y = -y;
  e.eigenvector = form.extend(y);
  return e;
}

SpectralEstimate lambda1_estimate(const GaussianMeasure& measure, const Grid& grid, std::optional<double> k_cut,
                                  CutoffMode mode) {
  const double h = grid.spacing();
  const double r0 = measure.geometry().r0;
  if (std::isfinite(r0) && h > r0 / 5.0) throw Error(ErrorKind::Resolution, "grid does not resolve r0");
  return lambda1_estimate(DiscreteForm(measure, grid, k_cut, mode));
}

OptimalityProbe optimality_probe(double gamma, int pole, const GaussianMeasure& measure, const Grid& grid,
                                 double coupling) {
  const int N = measure.dimension();
  if (!(gamma > 1.0 - N / 2.0 && gamma < 0.0))
    throw Error(ErrorKind::Domain, "gamma must lie in (1 - N/2, 0) for |x - a|^gamma to be in H^1_mu");
  OptimalityProbe p;
  p.gamma = gamma;
  p.pole = pole;
  p.coupling = coupling;
  p.resolution = grid.spacing();
  const auto hi = moment_bounds(gamma, pole, measure, grid);
  const auto lo = moment_bounds(gamma - 1.0, pole, measure, grid);
  p.i_gamma = hi.value;
  p.i_gamma_minus_1 = lo.value;
  p.moment_ratio = lo.value / hi.value;

  const auto b = measure.equivalence_bounds(pole);
  const double s = gamma + N / 2.0;
  p.ratio_lower_bound = (b.c1 * std::pow(2.0, s - 2.0) * std::pow(b.alpha2_tilde, 1.0 - s)) /
                        (b.c2 * std::pow(2.0, 2.0 * gamma + N - 1.0) * std::pow(b.alpha1_tilde, -s) * (s - 1.0));
  const double pref = gamma * gamma - coupling;
  p.r_bound = pref * p.moment_ratio;
  p.r_bound_closed = pref < 0.0 ? pref * p.ratio_lower_bound : p.r_bound;
  return p;
}

}  // namespace ouh
