#include "ouhardy/checks.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>

#include "ouhardy/parabolic.hpp"
#include "ouhardy/parallel.hpp"

namespace ouh {

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Fail: return "FAIL";
    case CheckStatus::Skip: return "SKIP";
  }
  return "?";
}

void RunResult::check(const std::string& name, bool passed, const std::string& detail) {
  checks.push_back({name, passed ? CheckStatus::Pass : CheckStatus::Fail, detail});
}

void RunResult::skip(const std::string& name, const std::string& detail) {
  checks.push_back({name, CheckStatus::Skip, detail});
}

void RunResult::merge(RunResult other) {
  for (auto& f : other.files) files.push_back(std::move(f));
  for (auto& c : other.checks) checks.push_back(std::move(c));
}

bool RunResult::ok() const {
  return std::none_of(checks.begin(), checks.end(), [](const CheckOutcome& c) { return c.status == CheckStatus::Fail; });
}

const CheckOutcome* RunResult::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

const CsvTable* RunResult::file(const std::string& name) const {
  for (const auto& f : files)
    if (f.first == name) return &f.second;
  return nullptr;
}

void RunResult::write(const std::filesystem::path& dir) const {
  for (const auto& [name, table] : files) table.write(dir / name);
}

ProblemConfig effective_config(const ProblemConfig& cfg, const RunOptions& opts) {
  ProblemConfig out = cfg;
  if (opts.coupling) out.coupling_c = *opts.coupling;
  if (opts.seed) out.seed = *opts.seed;
  if (opts.points_per_axis > 0) out.grid.points_per_axis = opts.points_per_axis;
  validate_config(out).throw_if_failed();
  return out;
}

double radial_moment(double beta, int dimension, int steps) {
  if (steps % 2) ++steps;
  const double L = 40.0, h = L / steps;
  const double p = 2.0 * beta + dimension - 1.0;
  auto f = [&](double r) { return r == 0.0 ? (p == 0.0 ? 1.0 : 0.0) : std::pow(r, p) * std::exp(-0.5 * r * r); };
  double s = f(0.0) + f(L);
  for (int k = 1; k < steps; ++k) s += (k % 2 ? 4.0 : 2.0) * f(k * h);
  return sphere_area(dimension) * s * h / 3.0;
}

namespace {

const auto num = format_number;

std::string describe(const char* label, double v) {
  std::ostringstream os;
  os << label << '=' << num(v);
  return os.str();
}

int resolution(const RunOptions& opts, int fallback) { return opts.points_per_axis > 0 ? opts.points_per_axis : fallback; }

std::uint64_t seed_of(const ProblemConfig& cfg, const RunOptions& opts) { return opts.seed ? *opts.seed : cfg.seed; }

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string k_label(std::optional<double> k) { return k ? num(*k) : "none"; }

std::vector<Vec> box_points(const GaussianMeasure& mu, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double R = default_radius(mu.geometry());
  std::uniform_real_distribution<double> u(-R, R);
  std::vector<Vec> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Vec x = mu.barycenter();
    for (int d = 0; d < x.size(); ++d) x[d] += u(rng);
    pts.push_back(x);
  }
  return pts;
}

CsvTable hardy_table() {
  return CsvTable({"config_hash", "bump", "coupling", "lhs", "dirichlet", "mass", "K", "margin", "error_bar",
                   "resolution"});
}

struct HardyRun {
  double worst = INFINITY;  // min over bumps of margin + error bar
  double min_margin = INFINITY;
  std::vector<double> orders;
};

HardyRun hardy_rows(CsvTable& table, const ProblemConfig& cfg, int m, int count, std::uint64_t seed,
                    HardyVariant variant, bool with_order) {
  const GaussianMeasure mu(cfg);
  const Grid g = make_grid(cfg, mu.geometry(), m);
  const Grid gc = make_grid(cfg, mu.geometry(), (m + 1) / 2);
  const auto bumps = bump_suite(cfg, gc, count, seed);
  std::vector<HardyCheck> checks(bumps.size());
  std::vector<double> coarse_bars(bumps.size(), 0.0);
  parallel_for(static_cast<int>(bumps.size()), [&](int i) {
    checks[i] = hardy_check(bumps[i], mu, g, variant);
    if (with_order) coarse_bars[i] = hardy_check(bumps[i], mu, gc, variant).error_bar;
  });
  const std::string hash = config_hash(cfg);
  HardyRun run;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto& f = checks[i].fine;
    table.add({hash, std::to_string(i), num(f.coupling), num(f.lhs), num(f.dirichlet), num(f.mass), num(f.constant),
               num(f.margin), num(checks[i].error_bar), num(f.resolution)});
    run.worst = std::min(run.worst, f.margin + checks[i].error_bar);
    run.min_margin = std::min(run.min_margin, f.margin);
    if (with_order && checks[i].error_bar > 0.0 && coarse_bars[i] > 0.0)
      run.orders.push_back(std::log2(coarse_bars[i] / checks[i].error_bar));
  }
  return run;
}

std::string hardy_detail(const HardyRun& r) {
  std::ostringstream os;
  os << "min margin=" << num(r.min_margin) << " min margin+error_bar=" << num(r.worst);
  return os.str();
}

}  // namespace

RunResult measure_check(const ProblemConfig& base, const RunOptions& opts) {
  const ProblemConfig cfg = effective_config(base, opts);
  const GaussianMeasure mu(cfg);
  const Geometry& geo = mu.geometry();
  const std::string hash = config_hash(cfg);
  const std::uint64_t seed = seed_of(cfg, opts);
  const Grid g = make_grid(cfg, geo, resolution(opts, 96));
  const std::string h = num(g.spacing());

  RunResult r;
  CsvTable t({"check_name", "config_hash", "value", "lower", "upper", "margin", "method", "resolution"});

  {
    const double tol = 1e-4;
    const double closed = mu.normalization();
    const double quad = normalization_by_quadrature(mu, g);
    const double rel = std::abs(quad - closed) / closed;
    t.add({"normalization", hash, num(quad), num(closed * (1 - tol)), num(closed * (1 + tol)), num(tol - rel),
           "tensor-trapezoid", h});
    r.check("measure.normalization", rel <= tol, describe("relative_error", rel));
  }

  {
    std::set<int> dims{3, 4, 5, cfg.dimension};
    double worst = 0.0;
    const int steps = 200000;
    for (int N : dims)
      for (double beta : {0.0, 0.5, 1.0, 2.0}) {
        const double exact = gamma_moment(beta, N);
        const double quad = radial_moment(beta, N, steps);
        const double rel = std::abs(exact - quad) / quad;
        worst = std::max(worst, rel);
        t.add({"gamma_moment N=" + std::to_string(N) + " beta=" + num(beta), hash, num(exact), num(quad * (1 - 1e-6)),
               num(quad * (1 + 1e-6)), num(1e-6 - rel), "radial-simpson", num(40.0 / steps)});
      }
    r.check("measure.gamma_identity", worst <= 1e-6, describe("max_relative_error", worst));
  }

  const auto points = box_points(mu, 10000, seed);
  {
    const double bound = 0.5 * geo.pole_count * geo.trace_a;
    double worst = -INFINITY;
    for (const auto& x : points) worst = std::max(worst, mu.drift_gap(x));
    const double at_bar = mu.drift_gap(geo.barycenter);
    t.add({"drift_gap_max", hash, num(worst), "-inf", num(bound), num(bound - worst), "random-10000", "0"});
    t.add({"drift_gap_barycenter", hash, num(at_bar), num(bound - 1e-10), num(bound + 1e-10),
           num(1e-10 - std::abs(at_bar - bound)), "pointwise", "0"});
    r.check("measure.drift_bound", worst <= bound * (1 + kInequalityTolerance) + kInequalityTolerance,
            describe("max_gap", worst) + " " + describe("bound", bound));
    r.check("measure.drift_equality", std::abs(at_bar - bound) <= 1e-10, describe("gap_at_barycenter", at_bar));
  }

  {
    auto pts = points;
    for (auto& x : mu.sample(10000, seed + 1)) pts.push_back(x);
    double worst = INFINITY, worst_app = INFINITY;
    for (int i = 0; i < geo.pole_count; ++i) {
      const auto e = equivalence_check(i, mu, pts);
      const double m = std::min(e.min_lower_margin, e.min_upper_margin);
      worst = std::min(worst, m);
      t.add({"equivalence pole=" + std::to_string(i), hash, num(m), "0", "inf", num(m), "random-20000", "0"});
      double app = INFINITY;
      for (const auto& x : pts) app = std::min(app, appendix_check(i, x, cfg.poles).margin);
      worst_app = std::min(worst_app, app);
      t.add({"distance_bounds pole=" + std::to_string(i), hash, num(app), "0", "inf", num(app), "random-20000", "0"});
    }
    r.check("measure.weight_equivalence", worst >= -kInequalityTolerance, describe("min_log_margin", worst));
    r.check("measure.distance_bounds", worst_app >= -kInequalityTolerance, describe("min_margin", worst_app));
  }

  {
    const double beta = -0.4;
    bool ok = true;
    std::string detail = "all brackets hold";
    for (int i = 0; i < geo.pole_count; ++i) {
      try {
        const auto mb = moment_bounds(beta, i, mu, g);
        t.add({"moment_bracket pole=" + std::to_string(i) + " beta=" + num(beta), hash, num(mb.value), num(mb.lower),
               num(mb.upper), num(std::min(mb.value - mb.lower, mb.upper - mb.value)), "subtracted-singular",
               num(mb.resolution)});
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::InequalityViolation) throw;
        ok = false;
        detail = e.what();
      }
    }
    r.check("measure.moment_bracket", ok, detail);

    const Grid gc = make_grid(cfg, geo, (g.points_per_axis() + 1) / 2);
    double lo = 0.0, hi = 0.0;
    moment_bracket(beta, 0, mu, lo, hi);
    const auto mc = moment_monte_carlo(beta, 0, mu, cfg.quadrature.samples, seed + 2);
    double value = 0.0, grid_err = 0.0;
    try {
      value = moment_bounds(beta, 0, mu, g).value;
      grid_err = std::abs(value - moment_bounds(beta, 0, mu, gc).value);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InequalityViolation) throw;
      value = std::nan("");
    }
    const double allowed = 4.0 * mc.standard_error + grid_err;
    const double diff = std::abs(mc.mean - value);
    t.add({"moment_monte_carlo pole=0 beta=" + num(beta), hash, num(mc.mean), num(value - allowed),
           num(value + allowed), num(allowed - diff), "monte-carlo-" + std::to_string(mc.samples), h});
    r.check("measure.monte_carlo", diff <= allowed,
            describe("difference", diff) + " " + describe("allowed", allowed));
  }

  r.files.emplace_back("measure_check.csv", std::move(t));
  return r;
}

RunResult verify_hardy(const ProblemConfig& base, const RunOptions& opts) {
  const ProblemConfig cfg = effective_config(base, opts);
  const auto geo = derive_geometry(cfg);
  const int m = resolution(opts, 64);
  const int count = opts.bumps > 0 ? opts.bumps : 50;
  RunResult r;
  CsvTable t = hardy_table();
  const auto run = hardy_rows(t, cfg, m, count, seed_of(cfg, opts), HardyVariant::Standard, true);
  if (cfg.coupling_c > geo.c0 * (1 + 1e-12)) {
    r.skip("hardy.margin", "coupling above c0: outside the hypothesis");
  } else {
    r.check("hardy.margin", run.worst >= 0.0, hardy_detail(run));
  }
  const double order = median(run.orders);
  r.check("hardy.error_bar_order", order >= 1.5 && order <= 2.5, describe("median_order", order));
  r.files.emplace_back("hardy_report.csv", std::move(t));
  return r;
}

RunResult improved_check(const ProblemConfig& base, const RunOptions& opts) {
  const ProblemConfig cfg = effective_config(base, opts);
  const int m = resolution(opts, 64);
  const int count = opts.bumps > 0 ? opts.bumps : 50;
  const int single = opts.one_pole_bumps > 0 ? opts.one_pole_bumps : std::max(1, count / 5);
  const std::uint64_t seed = seed_of(cfg, opts);
  RunResult r;
  CsvTable t = hardy_table();
  const auto run = hardy_rows(t, cfg, m, count, seed, HardyVariant::Improved, false);
  r.check("improved.margin", run.worst >= 0.0, hardy_detail(run));

  ProblemConfig one = cfg;
  one.poles = {cfg.poles.front()};
  const auto run1 = hardy_rows(t, one, m, single, seed + 1, HardyVariant::Improved, false);
  r.check("improved.one_pole_margin", run1.worst >= 0.0, hardy_detail(run1));
  r.files.emplace_back("improved_report.csv", std::move(t));
  return r;
}

RunResult lambda1_scan(const ProblemConfig& base, const RunOptions& opts) {
  const ProblemConfig cfg = effective_config(base, opts);
  const GaussianMeasure mu(cfg);
  const auto hc = hardy_constants(cfg);
  const Grid g = make_grid(cfg, mu.geometry(), cfg.grid.points_per_axis);
  const double c = cfg.coupling_c;
  const CutoffMode mode = cfg.evolve.cutoff_mode;

  std::vector<std::optional<double>> ks;
  if (!opts.k_cuts.empty()) {
    for (double k : opts.k_cuts) ks.emplace_back(k);
  } else if (c == 0.0) {
    ks.emplace_back(std::nullopt);
  } else {
    for (double k : {4.0, 16.0, 64.0, 256.0}) ks.emplace_back(k);
  }
  std::vector<SpectralEstimate> est(ks.size());
  parallel_for(static_cast<int>(ks.size()), [&](int i) { est[i] = lambda1_estimate(mu, g, ks[i], mode); });

  RunResult r;
  CsvTable t({"config_hash", "k_cut", "lambda1", "residual", "iterations"});
  const std::string hash = config_hash(cfg);
  double lowest = INFINITY;
  bool floor_ok = true;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    t.add({hash, k_label(ks[i]), num(est[i].value), num(est[i].residual), std::to_string(est[i].iterations)});
    lowest = std::min(lowest, est[i].value);
    if (ks[i]) floor_ok = floor_ok && est[i].value >= -cutoff_cap(c, *ks[i], mode) - kEigenTolerance;
  }

  if (c == 0.0) {
    r.check("lambda1.nonnegative", lowest >= -kEigenTolerance, describe("min_lambda1", lowest));
  } else if (c <= hc.c0 * (1 + 1e-12)) {
    r.check("lambda1.hardy_bound", lowest >= -hc.K, describe("min_lambda1", lowest) + " " + describe("-K", -hc.K));
  } else {
    bool ok = ks.size() >= 2;
    double first = 0.0, last = 0.0, smallest = INFINITY;
    for (std::size_t i = 1; i < est.size(); ++i) {
      const double dec = est[i - 1].value - est[i].value;
      if (i == 1) first = dec;
      last = dec;
      smallest = std::min(smallest, dec);
      ok = ok && dec > 1e-6;
    }
    ok = ok && last >= 0.5 * first;
    r.check("lambda1.decreasing", ok, describe("min_decrement", smallest) + " " + describe("last_decrement", last));
  }
  if (std::any_of(ks.begin(), ks.end(), [](const auto& k) { return k.has_value(); }))
    r.check("lambda1.cutoff_floor", floor_ok, "lambda1 >= -sup of the cut-off potential");
  r.files.emplace_back("lambda1.csv", std::move(t));
  return r;
}

RunResult optimality_scan(const ProblemConfig& base, const RunOptions& opts) {
  const ProblemConfig cfg = effective_config(base, opts);
  const GaussianMeasure mu(cfg);
  const Geometry& geo = mu.geometry();
  const Grid g = make_grid(cfg, geo, cfg.grid.points_per_axis);
  std::vector<double> gammas = opts.gammas;
  if (gammas.empty())
    for (double s : {0.6, 0.8, 0.98, 0.998}) gammas.push_back((1.0 - geo.dimension / 2.0) * s);

  std::vector<OptimalityProbe> probes(gammas.size());
  parallel_for(static_cast<int>(gammas.size()),
               [&](int i) { probes[i] = optimality_probe(gammas[i], 0, mu, g, cfg.coupling_c); });

  RunResult r;
  CsvTable t({"config_hash", "gamma", "I_gamma", "I_gamma_minus_1", "moment_ratio", "ratio_lower_bound", "R_bound",
              "R_bound_closed"});
  const std::string hash = config_hash(cfg);
  bool bracket = true, decreasing = true;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto& p = probes[i];
    t.add({hash, num(p.gamma), num(p.i_gamma), num(p.i_gamma_minus_1), num(p.moment_ratio), num(p.ratio_lower_bound),
           num(p.r_bound), num(p.r_bound_closed)});
    bracket = bracket && p.moment_ratio >= p.ratio_lower_bound;
    if (i > 0) decreasing = decreasing && p.r_bound < probes[i - 1].r_bound;
  }
  r.check("optimality.moment_ratio_bound", bracket, "I(gamma-1)/I(gamma) against the closed-form lower bound");
  if (cfg.coupling_c > geo.c0 * (1 + 1e-12)) {
    const double last = probes.empty() ? NAN : probes.back().r_bound;
    r.check("optimality.decreasing", decreasing && probes.size() >= 2, "R_bound along the gamma sequence");
    r.check("optimality.divergence", last < -100.0, describe("last_R_bound", last) + " threshold=-100");
  } else {
    r.skip("optimality.divergence", "coupling at or below c0: no divergence expected");
  }
  r.files.emplace_back("optimality.csv", std::move(t));
  return r;
}

RunResult ims_check(const ProblemConfig& base, const RunOptions& opts) {
  const ProblemConfig cfg = effective_config(base, opts);
  const GaussianMeasure mu(cfg);
  const Geometry& geo = mu.geometry();
  const Grid g = make_grid(cfg, geo, cfg.grid.points_per_axis);
  const double c = cfg.coupling_c;
  const PartitionOfUnity p = build_partition(cfg, opts.rho, opts.profile);
  const auto kh = lemma3_bound(p, g, c);
  const auto pc = check_partition(p, g);
  const int count = opts.bumps > 0 ? opts.bumps : 10;
  const auto bumps = bump_suite(cfg, g, count, seed_of(cfg, opts));

  RunResult r;
  CsvTable t({"config_hash", "property", "max_violation", "k_hat", "k_hat_below_pi2", "tolerance", "passed"});
  const std::string hash = config_hash(cfg);
  auto row = [&](const std::string& prop, double v, double tol, bool passed) {
    t.add({hash, prop, num(v), num(kh.k_hat), format_bool(kh.below_pi2), num(tol), format_bool(passed)});
  };

  const bool a = pc.orthogonality <= 1e-10, b = pc.sum_squares <= 1e-12, d = pc.gradient_sum <= 1e-10;
  row("partition_orthogonality", pc.orthogonality, 1e-10, a);
  row("partition_sum_of_squares", pc.sum_squares, 1e-12, b);
  row("partition_gradient_sum", pc.gradient_sum, 1e-10, d);
  const double ratio_excess = std::max(0.0, pc.ratio_max - pc.ratio_bound);
  row("partition_ratio_bound", ratio_excess, 1e-12 * pc.ratio_bound, ratio_excess <= 1e-12 * pc.ratio_bound);
  row("partition_gradient_finite_difference", pc.finite_difference, 1e-6, pc.finite_difference <= 1e-6);
  row("partition_disjoint", pc.disjoint ? 0.0 : 1.0, 0.0, pc.disjoint);
  r.check("ims.partition", a && b && d && pc.disjoint,
          describe("a", pc.orthogonality) + " " + describe("b", pc.sum_squares) + " " + describe("d", pc.gradient_sum));

  struct BumpOutcome {
    bool identity_ok = false;
    std::string identity_error;
    IdentityCheck identity;
    ChainReport chain;
  };
  std::vector<BumpOutcome> out(bumps.size());
  parallel_for(static_cast<int>(bumps.size()), [&](int i) {
    try {
      out[i].identity = ims_identity_check(bumps[i], mu, p, g, c);
      out[i].identity_ok = true;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::IdentityViolation) throw;
      out[i].identity_error = e.what();
    }
    out[i].chain = chain_bound(bumps[i], mu, p, g, c, kh.k_hat);
  });

  bool identity_ok = true;
  std::vector<double> orders;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& o = out[i];
    identity_ok = identity_ok && o.identity_ok;
    if (o.identity_ok) {
      row("identity bump=" + std::to_string(i), o.identity.coarse.residual, 5.0 * o.identity.error_estimate, true);
      orders.push_back(o.identity.observed_order);
    } else {
      row("identity bump=" + std::to_string(i), NAN, NAN, false);
    }
  }
  r.check("ims.identity", identity_ok, "residual <= 5 x refinement estimate on every bump");
  const double order = median(orders);
  const bool order_ok = order >= 1.5 && order <= 2.5;
  row("identity_order_median", order, 0.5, order_ok);
  r.check("ims.identity_order", order_ok, describe("median_order", order));

  bool chain_ok = true;
  const std::size_t displays = out.empty() ? 0 : out.front().chain.displays.size();
  for (std::size_t k = 0; k < displays; ++k) {
    double worst = 0.0, tol = 0.0;
    bool holds = true;
    for (const auto& o : out) {
      const auto& dc = o.chain.displays[k];
      tol = std::max(tol, dc.tolerance);
      holds = holds && dc.holds;
      if (!dc.holds) worst = std::max(worst, std::abs(dc.lhs - dc.rhs) - dc.tolerance);
    }
    chain_ok = chain_ok && holds;
    row("chain: " + out.front().chain.displays[k].name, worst, tol, holds);
  }
  if (c <= geo.c0 * (1 + 1e-12)) {
    std::string detail = "every display holds";
    for (const auto& o : out)
      if (const auto* f = o.chain.first_failure()) {
        detail = "first failure: " + f->name;
        break;
      }
    r.check("ims.chain", chain_ok, detail);
  } else {
    r.skip("ims.chain", "coupling above c0: outside the hypothesis");
  }
  r.files.emplace_back("ims_report.csv", std::move(t));
  return r;
}

RunResult evolve_run(const ProblemConfig& base, const RunOptions& opts) {
  const ProblemConfig cfg = effective_config(base, opts);
  const GaussianMeasure mu(cfg);
  const Grid g = make_grid(cfg, mu.geometry(), cfg.grid.points_per_axis);
  const double k = opts.k_cut ? *opts.k_cut : 64.0;
  const auto op = assemble(mu, g, k, cfg.evolve.cutoff_mode);
  const double dt = std::min(opts.dt ? *opts.dt : cfg.evolve.dt, 0.9 * op.positivity_threshold);
  const double T = opts.t_final ? *opts.t_final : cfg.evolve.t_final;
  const auto rep = evolve(default_initial_data(mu, g), op, dt, T);

  RunResult r;
  CsvTable t({"config_hash", "t", "norm", "log_norm", "min_value"});
  const std::string hash = config_hash(cfg);
  for (std::size_t i = 0; i < rep.times.size(); ++i)
    t.add({hash, num(rep.times[i]), num(rep.norm(i)), num(rep.log_norms[i]), num(rep.min_values[i])});
  r.check("evolve.positivity", rep.positive, "every iterate >= -1e-10 relative to its sup");
  if (op.within_hypothesis) {
    r.check("evolve.rate", rep.rate_ok,
            describe("omega_hat", rep.omega_hat) + " " + describe("bound", rep.rate_bound));
  } else {
    r.skip("evolve.rate", "coupling above c0: no exponential bound expected");
  }
  r.files.emplace_back("evolution.csv", std::move(t));
  return r;
}

RunResult blowup_run(const ProblemConfig& base, const RunOptions& opts) {
  const ProblemConfig cfg = effective_config(base, opts);
  const GaussianMeasure mu(cfg);
  const auto hc = hardy_constants(cfg);
  const Grid g = make_grid(cfg, mu.geometry(), cfg.grid.points_per_axis);
  std::vector<double> ks = opts.k_cuts;
  if (ks.empty())
    for (double k = 8.0; k <= cfg.evolve.cutoff_max; k *= 4.0) ks.push_back(k);
  const double dt = opts.dt ? *opts.dt : cfg.evolve.dt;
  const double T = opts.t_final ? *opts.t_final : cfg.evolve.t_final;

  RunResult r;
  ScanReport s;
  try {
    s = blowup_scan(default_initial_data(mu, g), mu, g, ks, dt, T, cfg.evolve.cutoff_mode);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::SchemeConsistency) throw;
    r.check("blowup.monotone", false, e.what());
    return r;
  }

  CsvTable t({"config_hash", "k_cut", "final_norm", "log_final_norm", "ratio", "omega_hat", "verdict"});
  const std::string hash = config_hash(cfg);
  const std::string verdict = to_string(s.verdict);
  bool positive = true;
  double omega = -INFINITY;
  for (const auto& e : s.entries) {
    t.add({hash, num(e.k_cut), num(std::exp(e.log_final_norm)), num(e.log_final_norm), num(e.ratio),
           num(e.omega_hat), verdict});
    positive = positive && e.positive;
    omega = std::max(omega, e.omega_hat);
  }
  const bool above = cfg.coupling_c > hc.c0 * (1 + 1e-12);
  // At c = c0 the cut-off limit converges too slowly for a finite scan to settle.
  const bool critical = !above && cfg.coupling_c >= hc.c0 * (1 - 1e-12);
  const Verdict expected = above ? Verdict::Growing : Verdict::Bounded;
  std::string detail = "verdict=" + verdict + " expected=" + (critical ? "not growing" : to_string(expected));
  if (!s.hint.empty()) detail += " hint: " + s.hint;
  r.check("blowup.verdict", critical ? s.verdict != Verdict::Growing : s.verdict == expected, detail);
  r.check("blowup.monotone", s.pointwise_monotone && s.norms_nondecreasing,
          describe("max_pointwise_violation", s.max_pointwise_violation));
  r.check("blowup.positivity", positive, "every run stays nonnegative");
  if (above) {
    r.skip("blowup.rate", "coupling above c0: no exponential bound expected");
  } else {
    const double bound = hc.K + kRateTolerance;
    r.check("blowup.rate", omega <= bound, describe("max_omega_hat", omega) + " " + describe("bound", bound));
  }
  r.files.emplace_back("scan.csv", std::move(t));
  return r;
}

RunResult run_suite(const ProblemConfig& cfg, const RunOptions& opts) {
  RunResult r;
  r.merge(measure_check(cfg, opts));
  r.merge(verify_hardy(cfg, opts));
  r.merge(improved_check(cfg, opts));
  r.merge(lambda1_scan(cfg, opts));
  r.merge(optimality_scan(cfg, opts));
  r.merge(ims_check(cfg, opts));
  r.merge(evolve_run(cfg, opts));
  r.merge(blowup_run(cfg, opts));
  return r;
}

std::string summary_table(const RunResult& r) {
  std::size_t width = 5;
  for (const auto& c : r.checks) width = std::max(width, c.name.size());
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(width)) << "check" << "  status  detail\n";
  int pass = 0, fail = 0, skip = 0;
  for (const auto& c : r.checks) {
    os << std::left << std::setw(static_cast<int>(width)) << c.name << "  " << std::setw(6) << to_string(c.status)
       << "  " << c.detail << '\n';
    (c.status == CheckStatus::Pass ? pass : c.status == CheckStatus::Fail ? fail : skip)++;
  }
  os << pass << " passed, " << fail << " failed, " << skip << " skipped\n";
  return os.str();
}

}  // namespace ouh
