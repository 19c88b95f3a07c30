#include <cmath>
#include <random>

#include "ouhardy/hardy.hpp"
#include "support.hpp"

using namespace ouh;
using namespace ouh::test;

TEST_CASE("potential at the origin and on the far region") {
  const auto cfg = s1_config();
  CHECK(potential(Vec::Zero(3), cfg) == doctest::Approx(0.5));
  auto doubled = cfg;
  doubled.coupling_c = 0.5;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  int far = 0;
  for (int t = 0; t < 2000; ++t) {
    const Vec x = vec({u(rng), u(rng), u(rng)});
    CHECK(potential(x, doubled) == doctest::Approx(2.0 * potential(x, cfg)));
    if ((x - cfg.poles[0]).norm() >= 1.0 && (x - cfg.poles[1]).norm() >= 1.0) {
      ++far;
      CHECK(potential(x, cfg) <= 0.5 + 1e-12);
    }
  }
  CHECK(far > 1000);
  expect_kind(ErrorKind::Singularity, [&] { potential(cfg.poles[1], cfg); });
}

TEST_CASE("potential decreases along rays leaving the pole set") {
  const auto cfg = s1_config();
  const Vec dir = vec({0.3, 0.8, -0.52}).normalized();
  double prev = INFINITY;
  for (double t = 2.0; t < 20.0; t += 0.25) {
    const double v = potential(t * dir, cfg);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("Hardy constants for S1") {
  const auto k = hardy_constants(s1_config());
  CHECK(k.c0 == doctest::Approx(0.25));
  CHECK(k.r0 == doctest::Approx(1.0));
  CHECK(k.K == doctest::Approx(7.75));
  CHECK(k.K_improved == doctest::Approx(3.0));
  const auto single = hardy_constants(one_pole(Vec::Zero(3), 0.25));
  CHECK(single.K == doctest::Approx(1.5));
}

TEST_CASE("cut-off value and lattice potential") {
  CHECK(cutoff_cap(0.25, 4.0, CutoffMode::Coupled) == doctest::Approx(1.0));
  CHECK(cutoff_cap(0.25, 4.0, CutoffMode::Absolute) == doctest::Approx(4.0));
  const auto cfg = s1_config();
  const GaussianMeasure mu(cfg);
  const Grid g = make_grid(cfg, mu.geometry(), 25);
  const DiscreteForm form(mu, g, 1.0);
  const auto origin = g.node_at(Vec::Zero(3));
  REQUIRE(origin.has_value());
  CHECK(form.potential()[form.local(*origin)] == doctest::Approx(0.25));
  CHECK(form.excluded_poles() == 0);
  const DiscreteForm bare(mu, g, std::nullopt);
  CHECK(bare.excluded_poles() == 2);
  CHECK(bare.unknowns() == form.unknowns() - 2);
}

TEST_CASE("lattice stiffness is symmetric and kills constants away from the faces") {
  const auto cfg = s1_config();
  const GaussianMeasure mu(cfg);
  const Grid g = make_grid(cfg, mu.geometry(), 21);
  const DiscreteForm form(mu, g, 4.0);
  const SparseMatrix& S = form.stiffness();
  CHECK((SparseMatrix(S.transpose()) - S).norm() <= 1e-14 * S.norm());
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(form.unknowns());
  const Eigen::VectorXd s1 = S * ones;
  for (Index k = 0; k < form.unknowns(); ++k) {
    const Index flat = form.nodes()[static_cast<std::size_t>(k)];
    bool inner = true;
    for (int a = 0; a < 3; ++a) {
      const int i = g.axis_index(flat, a);
      inner = inner && i > 1 && i < g.points_per_axis() - 2;
    }
    if (inner) CHECK(std::abs(s1[k]) <= 1e-13 * S.coeff(k, k));
    CHECK(S.coeff(k, k) > 0.0);
  }
  for (int o = 0; o < S.outerSize(); ++o)
    for (SparseMatrix::InnerIterator it(S, o); it; ++it)
      if (it.row() != it.col()) CHECK(it.value() <= 0.0);
}

TEST_CASE("lattice generator applied to x1 gives -x1 for one centered pole") {
  const auto cfg = one_pole(Vec::Zero(3), 0.0);
  const GaussianMeasure mu(cfg);
  const Grid g = Grid::centered(Vec::Zero(3), 3.0, 31);
  const DiscreteForm form(mu, g, std::nullopt);
  const Eigen::VectorXd u = form.restrict(sample(g, [](const Vec& x) { return x[0]; }));
  const Eigen::VectorXd Lu = form.apply(u);
  double err = 0.0;
  for (Index k = 0; k < form.unknowns(); ++k) {
    const Index flat = form.nodes()[static_cast<std::size_t>(k)];
    bool inner = true;
    for (int a = 0; a < 3; ++a) {
      const int i = g.axis_index(flat, a);
      inner = inner && i > 1 && i < g.points_per_axis() - 2;
    }
    if (inner) err = std::max(err, std::abs(Lu[k] + g.node(flat)[0]));
  }
  CHECK(err <= 0.05);
  CHECK(err > 0.0);
}

TEST_CASE("Hardy report for a centered bump") {
  const auto cfg = s1_config();
  const GaussianMeasure mu(cfg);
  const Grid g = make_grid(cfg, mu.geometry(), 41);
  auto bump = [](const Vec& x) {
    const double r2 = x.squaredNorm();
    return r2 >= 4.0 ? 0.0 : std::exp(-4.0 * r2);
  };
  const auto phi = sample(g, bump);
  const auto r = hardy_report(phi, mu);
  CHECK(r.constant == doctest::Approx(7.75));
  CHECK(r.lhs > 0.0);
  CHECK(r.dirichlet > 0.0);
  CHECK(r.mass > 0.0);
  CHECK(r.margin >= 0.0);

  SUBCASE("quadratic homogeneity") {
    ScalarField five = phi;
    five.values *= 5.0;
    const auto s = hardy_report(five, mu);
    CHECK(s.lhs == doctest::Approx(25.0 * r.lhs));
    CHECK(s.dirichlet == doctest::Approx(25.0 * r.dirichlet));
    CHECK(s.mass == doctest::Approx(25.0 * r.mass));
    CHECK(s.margin == doctest::Approx(25.0 * r.margin));
  }
  SUBCASE("degenerate and inadmissible fields") {
    ScalarField zero = phi;
    zero.values.setZero();
    expect_kind(ErrorKind::DegenerateInput, [&] { hardy_report(zero, mu); });
    const auto flat = sample(g, [](const Vec&) { return 1.0; });
    expect_kind(ErrorKind::Input, [&] { hardy_report(flat, mu); });
    ScalarField bad = phi;
    bad.values[g.size() / 2] = NAN;
    expect_kind(ErrorKind::Input, [&] { hardy_report(bad, mu); });
  }
}

TEST_CASE("improved constant for S1 and for one pole") {
  auto cfg = s1_config();
  cfg.coupling_c = 0.125;
  const GaussianMeasure mu(cfg);
  const Grid g = make_grid(cfg, mu.geometry(), 41);
  for (const auto& b : bump_suite(cfg, g, 5, 21)) {
    const auto r = improved_report(sample(g, b), mu);
    CHECK(r.coupling == doctest::Approx(0.125));
    CHECK(r.constant == doctest::Approx(3.0));
    CHECK(r.margin >= 0.0);
  }
  const auto single = one_pole(Vec::Zero(3), 0.25);
  const GaussianMeasure mu1(single);
  const Grid g1 = make_grid(single, mu1.geometry(), 41);
  for (const auto& b : bump_suite(single, g1, 5, 22)) {
    const auto r = improved_report(sample(g1, b), mu1);
    CHECK(r.constant == doctest::Approx(1.5));
    CHECK(r.margin >= 0.0);
  }
}

TEST_CASE("a field far from the poles sees a small potential") {
  const auto cfg = one_pole(Vec::Zero(3), 0.25);
  const GaussianMeasure mu(cfg);
  const Vec center = vec({12.0, 0.0, 0.0});
  const Grid g = Grid::centered(center, 1.5, 31);
  const auto phi = sample(g, [&](const Vec& x) {
    const double r2 = (x - center).squaredNorm();
    return r2 >= 1.0 ? 0.0 : std::pow(1.0 - r2, 3);
  });
  const auto r = improved_report(phi, mu);
  CHECK(r.lhs <= 0.25 / 100.0 * r.mass);
}

TEST_CASE("bump suite is deterministic and fits the box") {
  const auto cfg = s1_config();
  const GaussianMeasure mu(cfg);
  const Grid g = make_grid(cfg, mu.geometry(), 33);
  const auto a = bump_suite(cfg, g, 30, 5);
  const auto b = bump_suite(cfg, g, 30, 5);
  REQUIRE(a.size() == 30);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].center == b[i].center);
    CHECK(a[i].sharpness == b[i].sharpness);
    for (int d = 0; d < 3; ++d) {
      CHECK(a[i].center[d] - a[i].support_radius() > g.origin()[d]);
      CHECK(a[i].center[d] + a[i].support_radius() < g.coordinate(d, g.points_per_axis() - 1));
    }
  }
  CHECK(bump_suite(cfg, g, 30, 6)[0].center != a[0].center);
}

TEST_CASE("Hardy margins over a small suite stay above the refinement error bar") {
  const auto cfg = s1_config();
  const GaussianMeasure mu(cfg);
  const Grid g = make_grid(cfg, mu.geometry(), 25);
  for (const auto& b : bump_suite(cfg, g, 6, 9)) {
    const auto c = hardy_check(b, mu, g, HardyVariant::Standard);
    CHECK(c.fine.margin >= -c.error_bar);
    CHECK(c.fine.resolution == doctest::Approx(0.5 * c.coarse.resolution));
  }
}

TEST_CASE("lambda1 for the Dirichlet form and under cut-offs") {
  auto cfg = s1_config();
  cfg.coupling_c = 0.0;
  const GaussianMeasure free_mu(cfg);
  const Grid g = make_grid(cfg, free_mu.geometry(), 41);
  const auto e0 = lambda1_estimate(free_mu, g, std::nullopt);
  CHECK(e0.value >= 0.0);
  CHECK(e0.residual <= kEigenTolerance);

  double prev = e0.value;
  for (double c : {0.125, 0.25}) {
    cfg.coupling_c = c;
    const GaussianMeasure mu(cfg);
    const auto e = lambda1_estimate(mu, g, 4.0);
    CHECK(e.value < prev);
    CHECK(e.value >= -c * 4.0 * 2.0);
    CHECK(e.value >= -hardy_constants(cfg).K);
    prev = e.value;
  }

  cfg.coupling_c = 0.5;
  const GaussianMeasure strong(cfg);
  double last = INFINITY;
  for (double k : {4.0, 16.0, 64.0}) {
    const auto e = lambda1_estimate(strong, g, k);
    CHECK(e.value < last);
    CHECK(e.k_cut.value() == k);
    last = e.value;
  }
  expect_kind(ErrorKind::Resolution, [&] { lambda1_estimate(strong, make_grid(cfg, strong.geometry(), 21), 4.0); });
}

TEST_CASE("eigenvector is a fixed point of the Rayleigh quotient") {
  const auto cfg = s1_config();
  const GaussianMeasure mu(cfg);
  const Grid g = make_grid(cfg, mu.geometry(), 41);
  const DiscreteForm form(mu, g, 4.0);
  const auto e = lambda1_estimate(form);
  const Eigen::VectorXd y = form.restrict(e.eigenvector);
  CHECK(form.mass_norm2(y) == doctest::Approx(1.0));
  const double q = form.dirichlet(y) - form.potential_energy(y);
  CHECK(q == doctest::Approx(e.value).epsilon(1e-10));
}

TEST_CASE("optimality probe") {
  auto cfg = s1_config();
  cfg.coupling_c = 0.375;
  const GaussianMeasure mu(cfg);
  const Grid g = make_grid(cfg, mu.geometry(), 48);
  SUBCASE("negative prefactor gives a negative bound") {
    const auto p = optimality_probe(-0.45, 0, mu, g, 0.375);
    CHECK(p.gamma * p.gamma - p.coupling == doctest::Approx(-0.1725));
    CHECK(p.i_gamma > 0.0);
    CHECK(p.i_gamma_minus_1 > 0.0);
    CHECK(p.r_bound < 0.0);
    CHECK(p.moment_ratio >= p.ratio_lower_bound);
    CHECK(p.r_bound <= p.r_bound_closed);
  }
  SUBCASE("bound decreases towards the endpoint") {
    double prev = INFINITY;
    for (double gamma : {-0.30, -0.40, -0.49, -0.499}) {
      const auto p = optimality_probe(gamma, 1, mu, g, 0.375);
      CHECK(p.r_bound < prev);
      prev = p.r_bound;
    }
  }
  SUBCASE("moment ratio blows up like the inverse distance to the endpoint") {
    double lo = INFINITY, hi = 0.0;
    for (double gamma : {-0.499, -0.49, -0.47, -0.45, -0.42, -0.40}) {
      const auto p = optimality_probe(gamma, 0, mu, g, 0.375);
      const double scaled = (gamma + 0.5) * p.moment_ratio;
      lo = std::min(lo, scaled);
      hi = std::max(hi, scaled);
    }
    CHECK(lo > 0.0);
    CHECK(hi / lo < 3.0);
  }
  SUBCASE("gamma outside the admissible interval") {
    expect_kind(ErrorKind::Domain, [&] { optimality_probe(-0.5, 0, mu, g, 0.375); });
    expect_kind(ErrorKind::Domain, [&] { optimality_probe(0.0, 0, mu, g, 0.375); });
  }
}
