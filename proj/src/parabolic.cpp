#include "ouhardy/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/IterativeLinearSolvers>

#include "ouhardy/parallel.hpp"

namespace ouh {

namespace {

using Cg = Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>>;

double sup_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

DiscreteOperator assemble(const GaussianMeasure& measure, const Grid& grid, std::optional<double> k_cut,
                          CutoffMode mode) {
  if (!k_cut && measure.config().coupling_c != 0.0)
    throw Error(ErrorKind::Input, "the evolution operator needs a cut-off index when c > 0");
  DiscreteOperator op{DiscreteForm(measure, grid, k_cut, mode), 0.0, hardy_constants(measure.config()).K,
                      measure.config().coupling_c <= measure.geometry().c0};
  const double w = op.form.max_potential();
  op.positivity_threshold = w > 0.0 ? 1.0 / w : std::numeric_limits<double>::infinity();
  return op;
}

Eigen::VectorXd apply_generator(const DiscreteOperator& op, const Eigen::VectorXd& u) {
  Eigen::VectorXd out = -(op.form.stiffness() * u);
  return out.cwiseQuotient(op.form.mass());
}

double integration_by_parts_defect(const DiscreteOperator& op, const ScalarField& u, const ScalarField& v) {
  const Grid& g = op.form.grid();
  const auto gu = gradient(u);
  const auto gv = gradient(v);
  Eigen::VectorXd dot = Eigen::VectorXd::Zero(g.size());
  for (std::size_t a = 0; a < gu.components.size(); ++a)
    dot.array() += gu.components[a].array() * gv.components[a].array();
  // mu at nodes recovered from the mass vector; faces carry no mass.
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(g.size());
  for (Index k = 0; k < op.form.unknowns(); ++k) mu[op.form.nodes()[static_cast<std::size_t>(k)]] = op.form.mass()[k] / g.cell_volume();
  const double grad_term = tensor_quadrature(dot.cwiseProduct(mu), g);
  const Eigen::VectorXd uu = op.form.restrict(u);
  const Eigen::VectorXd vv = op.form.restrict(v);
  const double gen_term = op.form.mass().cwiseProduct(apply_generator(op, uu)).dot(vv);
  return std::abs(grad_term + gen_term);
}

ImplicitEuler::ImplicitEuler(const DiscreteOperator& op, double dt) : op_(&op), dt_(dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::Input, "time step must be positive");
  if (!(dt < op.positivity_threshold))
    throw Error(ErrorKind::Stability, "dt = " + std::to_string(dt) + " exceeds the positivity threshold " +
                                          std::to_string(op.positivity_threshold));
  system_ = dt * op.form.form_matrix();
  for (Index k = 0; k < op.form.unknowns(); ++k) system_.coeffRef(k, k) += op.form.mass()[k];
  system_.makeCompressed();
}

Eigen::VectorXd ImplicitEuler::advance(const Eigen::VectorXd& u) const {
  Cg cg;
  cg.setTolerance(1e-13);
  cg.setMaxIterations(std::max<Index>(1000, system_.rows()));
  cg.compute(system_);
  const Eigen::VectorXd rhs = op_->form.mass().cwiseProduct(u);
  Eigen::VectorXd out = cg.solveWithGuess(rhs, u);
  if (cg.info() != Eigen::Success && cg.error() > 1e-10)
    throw Error(ErrorKind::Solver, "implicit step did not converge (relative residual " + std::to_string(cg.error()) + ")");
  return out;
}

ScalarField step(const ScalarField& u, const DiscreteOperator& op, double dt) {
  const ImplicitEuler stepper(op, dt);
  return op.form.extend(stepper.advance(op.form.restrict(u)));
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Bounded: return "bounded";
    case Verdict::Growing: return "growing";
    default: return "inconclusive";
  }
}

double EvolutionReport::norm(std::size_t i) const { return std::exp(log_norms.at(i)); }

ScalarField default_initial_data(const GaussianMeasure& measure, const Grid& grid) {
  Bump b;
  b.center = measure.barycenter();
  b.sharpness = 2.0;
  auto f = sample(grid, b);
  for (Index i = 0; i < grid.size(); ++i)
    if (grid.on_boundary(i)) f.values[i] = 0.0;
  const double n2 = tensor_quadrature(f.values.array().square().matrix().cwiseProduct(measure.density_on(grid)), grid);
  f.values /= std::sqrt(n2);
  return f;
}

EvolutionReport evolve(const ScalarField& u0, const DiscreteOperator& op, double dt, double T) {
  const auto& form = op.form;
  Eigen::VectorXd v = form.restrict(u0);
  if ((v.array() < 0.0).any()) throw Error(ErrorKind::Input, "initial data must be nonnegative");
  const double n0 = std::sqrt(form.mass_norm2(v));
  if (n0 == 0.0) throw Error(ErrorKind::DegenerateInput, "initial data vanishes");

  EvolutionReport r;
  r.k_cut = form.k_cut();
  const ImplicitEuler stepper(op, dt);
  const int steps = std::max(1, static_cast<int>(std::lround(T / dt)));
  double log_scale = std::log(n0);
  v /= n0;
  r.times.push_back(0.0);
  r.log_norms.push_back(log_scale);
  r.min_values.push_back(v.minCoeff() / sup_norm(v));
  for (int s = 1; s <= steps; ++s) {
    v = stepper.advance(v);
    const double sup = sup_norm(v);
    const double rel_min = sup > 0.0 ? v.minCoeff() / sup : 0.0;
    if (rel_min < -kPositivityTolerance) {
      r.positive = false;
      throw Error(ErrorKind::PositivityViolation, "iterate at t = " + std::to_string(s * dt) + " has relative minimum " +
                                                      std::to_string(rel_min));
    }
    const double nn = std::sqrt(form.mass_norm2(v));
    if (!(nn > 0.0) || !std::isfinite(nn)) throw Error(ErrorKind::Solver, "solution norm is not finite");
    log_scale += std::log(nn);
    v /= nn;
    r.times.push_back(s * dt);
    r.log_norms.push_back(log_scale);
    r.min_values.push_back(rel_min);
  }

  // Least squares line through (t, log ||u||) on the second half of the window.
  const double t_half = 0.5 * r.times.back();
  double st = 0, sy = 0, stt = 0, sty = 0;
  int cnt = 0;
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    if (r.times[i] < t_half) continue;
    st += r.times[i];
    sy += r.log_norms[i];
    stt += r.times[i] * r.times[i];
    sty += r.times[i] * r.log_norms[i];
    ++cnt;
  }
  const double den = cnt * stt - st * st;
  r.omega_hat = cnt > 1 && den != 0.0 ? (cnt * sty - st * sy) / den : 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < r.times.size(); ++i)
    worst = std::max(worst, r.log_norms[i] - r.log_norms[0] - r.omega_hat * r.times[i]);
  r.m_hat = std::exp(worst);

  r.rate_bound = op.rate_constant + kRateTolerance;
  r.rate_ok = !op.within_hypothesis || r.omega_hat <= r.rate_bound;
  if (r.omega_hat > r.rate_bound) r.verdict = Verdict::Growing;
  else if (op.within_hypothesis) r.verdict = Verdict::Bounded;
  r.final_shape = v;
  r.final_log_scale = log_scale;
  return r;
}

Verdict classify_ratios(const std::vector<double>& ratios, double delta) {
  if (ratios.empty()) return Verdict::Inconclusive;
  const std::size_t n = ratios.size();
  if (n >= 3) {
    bool growing = true;
    for (std::size_t i = n - 3; i < n; ++i) {
      if (!(ratios[i] > 1.0 + delta)) growing = false;
      if (i > n - 3 && !(ratios[i] >= ratios[i - 1])) growing = false;
    }
    if (growing) return Verdict::Growing;
  }
  const bool settled =
      std::all_of(ratios.begin(), ratios.end(), [&](double r) { return std::abs(r - 1.0) <= delta; });
  return settled ? Verdict::Bounded : Verdict::Inconclusive;
}

namespace {

ScanReport run_scan(const ScalarField& u0, const GaussianMeasure& measure, const Grid& grid,
                    const std::vector<double>& k_cuts, double dt, double T, CutoffMode mode) {
  if (k_cuts.empty()) throw Error(ErrorKind::Input, "cut-off scan needs at least one index");
  for (std::size_t i = 1; i < k_cuts.size(); ++i)
    if (k_cuts[i] < k_cuts[i - 1]) throw Error(ErrorKind::Input, "cut-off indices must be nondecreasing");
  std::vector<DiscreteOperator> ops;
  ops.reserve(k_cuts.size());
  double wmax = 0.0;
  for (double k : k_cuts) {
    ops.push_back(assemble(measure, grid, k, mode));
    wmax = std::max(wmax, ops.back().form.max_potential());
  }
  ScanReport s;
  s.coupling = measure.config().coupling_c;
  s.dt = wmax > 0.0 ? std::min(dt, 0.9 / wmax) : dt;
  std::vector<EvolutionReport> runs(k_cuts.size());
  parallel_for(static_cast<int>(k_cuts.size()),
               [&](int i) { runs[static_cast<std::size_t>(i)] = evolve(u0, ops[static_cast<std::size_t>(i)], s.dt, T); });

  for (std::size_t i = 0; i < runs.size(); ++i) {
    ScanEntry e;
    e.k_cut = k_cuts[i];
    e.log_final_norm = runs[i].log_norms.back();
    e.ratio = i ? std::exp(e.log_final_norm - runs[i - 1].log_norms.back()) : 0.0;
    e.positive = runs[i].positive;
    e.omega_hat = runs[i].omega_hat;
    s.entries.push_back(e);
    if (i && e.log_final_norm < runs[i - 1].log_norms.back() - 1e-12) s.norms_nondecreasing = false;
  }
  // u_k <= u_{k+1} + tol * max(1, sup u_{k+1}), evaluated in scaled form.
  for (std::size_t i = 1; i < runs.size(); ++i) {
    const auto& a = runs[i - 1];
    const auto& b = runs[i];
    const double sup_b = sup_norm(b.final_shape);
    const double log_ref = std::max(0.0, b.final_log_scale + std::log(sup_b));
    const double fa = std::exp(a.final_log_scale - log_ref);
    const double fb = std::exp(b.final_log_scale - log_ref);
    const double worst = (fa * a.final_shape - fb * b.final_shape).maxCoeff();
    s.max_pointwise_violation = std::max(s.max_pointwise_violation, worst);
  }
  s.pointwise_monotone = s.max_pointwise_violation <= kMonotonicityTolerance;
  return s;
}

}  // namespace

ScanReport monotonicity_scan(const ScalarField& u0, const GaussianMeasure& measure, const Grid& grid,
                             const std::vector<double>& k_cuts, double dt, double T, CutoffMode mode) {
  ScanReport s = run_scan(u0, measure, grid, k_cuts, dt, T, mode);
  std::vector<double> ratios;
  for (std::size_t i = 1; i < s.entries.size(); ++i) ratios.push_back(s.entries[i].ratio);
  s.verdict = classify_ratios(ratios);
  if (!s.pointwise_monotone || !s.norms_nondecreasing)
    throw Error(ErrorKind::SchemeConsistency, "cut-off monotonicity violated by " + std::to_string(s.max_pointwise_violation));
  return s;
}

ScanReport blowup_scan(const ScalarField& u0, const GaussianMeasure& measure, const Grid& grid,
                       const std::vector<double>& k_cuts, double dt, double T, CutoffMode mode, double delta) {
  if (!(measure.config().coupling_c >= 0.0)) throw Error(ErrorKind::Input, "blowup scan needs c >= 0");
  ScanReport s = run_scan(u0, measure, grid, k_cuts, dt, T, mode);
  std::vector<double> ratios;
  for (std::size_t i = 1; i < s.entries.size(); ++i) ratios.push_back(s.entries[i].ratio);
  s.verdict = classify_ratios(ratios, delta);
  if (s.verdict == Verdict::Inconclusive)
    s.hint = "ratios neither settle nor grow monotonically; refine the grid or extend the cut-off sequence";
  return s;
}

CoercivityReport coercivity_check(const DiscreteForm& form, const std::vector<Eigen::VectorXd>& probes, double K) {
  CoercivityReport r;
  r.bound = -K;
  r.min_quotient = std::numeric_limits<double>::infinity();
  r.min_h1_quotient = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const auto& u = probes[p];
    const double mass = form.mass_norm2(u);
    if (mass == 0.0) continue;
    const double dir = form.dirichlet(u);
    const double a = dir - form.potential_energy(u);
    const double q = a / mass;
    ++r.probes;
    if (q < r.min_quotient) {
      r.min_quotient = q;
      r.worst_probe = static_cast<int>(p);
    }
    r.min_h1_quotient = std::min(r.min_h1_quotient, a / (dir + mass));
  }
  r.ok = r.min_quotient >= r.bound - 1e-9 * (1.0 + std::abs(r.bound));
  return r;
}

CoercivityReport coercivity_check(const GaussianMeasure& measure, const Grid& grid, int probes, std::uint64_t seed) {
  const DiscreteForm form(measure, grid, std::nullopt);
  std::vector<Eigen::VectorXd> us;
  for (const auto& b : bump_suite(measure.config(), grid, probes, seed)) us.push_back(form.restrict(sample(grid, b)));
  return coercivity_check(form, us, hardy_constants(measure.config()).K);
}

}  // namespace ouh
