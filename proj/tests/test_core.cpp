#include <cmath>
#include <random>

#include <doctest.h>

#include "ouhardy/config.hpp"
#include "ouhardy/grid.hpp"

using namespace ouh;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("validate_config on S1 caches the derived constants") {
  const auto report = validate_config(s1_config());
  CHECK(report.ok());
  const auto& g = report.geometry;
  CHECK(g.r0 == doctest::Approx(1.0));
  CHECK(g.c0 == doctest::Approx(0.25));
  CHECK(g.trace_a == doctest::Approx(3.0));
  CHECK(g.alpha1 == doctest::Approx(1.0));
  CHECK(g.alpha2 == doctest::Approx(1.0));
  CHECK(g.barycenter.norm() == doctest::Approx(0.0));
}

TEST_CASE("validate_config rejects duplicate poles with a geometry error") {
  auto cfg = s1_config();
  cfg.poles = {vec({1, 0, 0}), vec({1, 0, 0})};
  CHECK_FALSE(validate_config(cfg).ok());
  try {
    derive_geometry(cfg);
    FAIL("expected a geometry error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Geometry);
  }
}

TEST_CASE("validate_config reads eigenvalue bounds off a diagonal matrix") {
  ProblemConfig cfg;
  cfg.dimension = 4;
  cfg.poles = {vec({1, 0, 0, 0}), vec({-1, 0, 0, 0})};
  cfg.matrix_a = vec({1, 2, 3, 4}).asDiagonal();
  const auto g = derive_geometry(cfg);
  CHECK(g.c0 == doctest::Approx(1.0));
  CHECK(g.trace_a == doctest::Approx(10.0));
  CHECK(g.alpha1 == doctest::Approx(1.0));
  CHECK(g.alpha2 == doctest::Approx(4.0));
}

TEST_CASE("validate_config error kinds") {
  SUBCASE("dimension below three") {
    ProblemConfig cfg;
    cfg.dimension = 2;
    cfg.poles = {vec({0, 0})};
    cfg.matrix_a = Mat::Identity(2, 2);
    CHECK_THROWS_AS(derive_geometry(cfg), Error);
    try {
      derive_geometry(cfg);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Dimension);
    }
  }
  SUBCASE("non-symmetric matrix") {
    auto cfg = s1_config();
    cfg.matrix_a(0, 1) = 0.5;
    try {
      derive_geometry(cfg);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DefiniteMatrix);
    }
  }
  SUBCASE("indefinite matrix") {
    auto cfg = s1_config();
    cfg.matrix_a(2, 2) = -1.0;
    try {
      derive_geometry(cfg);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DefiniteMatrix);
    }
  }
}

TEST_CASE("c0 is increasing in the dimension") {
  CHECK(optimal_constant(3) == 0.25);
  CHECK(optimal_constant(4) == 1.0);
  for (int N = 3; N < 12; ++N) CHECK(optimal_constant(N + 1) > optimal_constant(N));
}

TEST_CASE("eigenvalue sandwich holds for random vectors") {
  Mat A(3, 3);
  A << 2.0, 0.3, -0.1, 0.3, 1.5, 0.2, -0.1, 0.2, 0.8;
  auto cfg = s1_config();
  cfg.matrix_a = A;
  const auto g = derive_geometry(cfg);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  for (int k = 0; k < 1000; ++k) {
    Vec v(3);
    for (int d = 0; d < 3; ++d) v[d] = normal(rng);
    const double q = v.dot(A * v);
    CHECK(q >= g.alpha1 * v.squaredNorm() - 1e-12);
    CHECK(q <= g.alpha2 * v.squaredNorm() + 1e-12);
  }
}

TEST_CASE("config parsing") {
  const std::string text = R"({
    "dimension": 3,
    "poles": [[-1, 0, 0], [1, 0, 0]],
    "matrix_a": [1, 0, 0, 0, 1, 0, 0, 0, 1],
    "coupling_c": 0.25,
    "ims_k": 4.0,
    "grid": {"radius": 0, "points_per_axis": 32},
    "quadrature": {"method": "monte_carlo", "samples": 1000},
    "evolve": {"dt": 0.001, "t_final": 1.0, "cutoff_max": 64}
  })";
  const auto cfg = parse_config(text);
  CHECK(cfg.pole_count() == 2);
  CHECK(cfg.grid.points_per_axis == 32);
  CHECK(cfg.quadrature.method == QuadratureMethod::MonteCarlo);
  CHECK(cfg.evolve.cutoff_max == 64);
  CHECK(validate_config(cfg).ok());

  SUBCASE("round trip through the serializer keeps the hash") {
    const auto again = parse_config(config_to_json(cfg));
    CHECK(config_hash(again) == config_hash(cfg));
  }
  SUBCASE("unknown keys are rejected with their path") {
    try {
      parse_config(R"({"dimension": 3, "poles": [[0,0,0]], "grid": {"spacing": 1}})");
      FAIL("expected a config error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Config);
      CHECK(std::string(e.what()).find("grid.spacing") != std::string::npos);
    }
  }
  SUBCASE("hash changes with the coupling") {
    auto other = cfg;
    other.coupling_c = 0.5;
    CHECK(config_hash(other) != config_hash(cfg));
  }
}

TEST_CASE("gradient is exact on linear and quadratic fields") {
  const Grid g = Grid::centered(Vec::Zero(3), 2.0, 11);
  const auto lin = gradient(sample(g, [](const Vec& x) { return x[0]; }));
  const auto quad = gradient(sample(g, [](const Vec& x) { return x.squaredNorm(); }));
  double err_lin = 0.0, err_quad = 0.0;
  g.for_each_node([&](Index i, const Vec& x) {
    if (g.on_boundary(i)) return;
    err_lin = std::max({err_lin, std::abs(lin.components[0][i] - 1.0), std::abs(lin.components[1][i]),
                        std::abs(lin.components[2][i])});
    for (int a = 0; a < 3; ++a) err_quad = std::max(err_quad, std::abs(quad.components[a][i] - 2.0 * x[a]));
  });
  CHECK(err_lin < 1e-12);
  CHECK(err_quad < 1e-12);
}

TEST_CASE("gradient of sin obeys the Taylor remainder bound") {
  const Grid g = Grid::centered(Vec::Zero(3), 4.0, 64);
  const auto grad = gradient(sample(g, [](const Vec& x) { return std::sin(x[0]); }));
  const double h = g.spacing();
  double err = 0.0;
  g.for_each_node([&](Index i, const Vec& x) {
    if (!g.on_boundary(i)) err = std::max(err, std::abs(grad.components[0][i] - std::cos(x[0])));
  });
  CHECK(err <= h * h / 6.0 + 1e-12);
}

TEST_CASE("gradient needs three points per axis") {
  CHECK_THROWS_AS(Grid::centered(Vec::Zero(3), 1.0, 2), Error);
}

TEST_CASE("tensor quadrature") {
  SUBCASE("box volume") {
    const Grid g = Grid::centered(Vec::Zero(3), 1.0, 9);
    CHECK(std::abs(tensor_quadrature(Eigen::VectorXd::Ones(g.size()), g) - 8.0) < 1e-12);
  }
  SUBCASE("Gaussian integral") {
    const Grid g = Grid::centered(Vec::Zero(3), 6.0, 96);
    const auto f = sample(g, [](const Vec& x) { return std::exp(-0.5 * x.squaredNorm()); });
    const double exact = std::pow(2.0 * M_PI, 1.5);
    CHECK(std::abs(tensor_quadrature(f.values, g) - exact) / exact < 1e-4);
  }
  SUBCASE("odd integrand vanishes") {
    const Grid g = Grid::centered(Vec::Zero(3), 3.0, 32);
    const auto f = sample(g, [](const Vec& x) { return x[0] * std::exp(-x.squaredNorm()); });
    CHECK(std::abs(tensor_quadrature(f.values, g)) < 1e-12);
  }
  SUBCASE("linear in the integrand and invariant under axis relabeling") {
    const Grid g = Grid::centered(Vec::Zero(3), 2.0, 17);
    auto f1 = [](const Vec& x) { return std::exp(-x[0] * x[0] - 2.0 * x[1] * x[1] - 3.0 * x[2] * x[2]) * (1 + x[0]); };
    auto f2 = [](const Vec& x) { return std::cos(x[0] + 0.5 * x[1]) + x[2] * x[2]; };
    auto f1_perm = [&](const Vec& x) { return f1(vec({x[2], x[0], x[1]})); };
    const double i1 = tensor_quadrature(sample(g, f1).values, g);
    const double i2 = tensor_quadrature(sample(g, f2).values, g);
    const double i12 = tensor_quadrature(sample(g, [&](const Vec& x) { return 2.0 * f1(x) - 3.0 * f2(x); }).values, g);
    CHECK(i12 == doctest::Approx(2.0 * i1 - 3.0 * i2).epsilon(1e-12));
    CHECK(tensor_quadrature(sample(g, f1_perm).values, g) == doctest::Approx(i1).epsilon(1e-12));
  }
}

TEST_CASE("grid for S1 is centered, contains the poles and aligns them with nodes") {
  const auto cfg = s1_config();
  const auto geo = derive_geometry(cfg);
  const Grid g = make_grid(cfg, geo, 48);
  const double h0 = 2.0 * default_radius(geo) / 47.0;
  CHECK(g.spacing() <= h0 + 1e-12);
  CHECK(g.spacing() >= h0 / 1.5);
  CHECK(g.spacing() == doctest::Approx(1.0 / 6.0));
  CHECK(poles_on_nodes(g, cfg.poles));
  CHECK((g.center() - geo.barycenter).cwiseAbs().maxCoeff() <= 0.5 * g.spacing() + 1e-12);
  for (const auto& a : cfg.poles) CHECK(g.contains_strictly(a));
  SUBCASE("refinement keeps poles on nodes") { CHECK(poles_on_nodes(g.refined(), cfg.poles)); }
  SUBCASE("alignment can be disabled") {
    auto plain = cfg;
    plain.grid.align_poles = false;
    const Grid p = make_grid(plain, geo, 48);
    CHECK(p.radius() == doctest::Approx(default_radius(geo)));
    CHECK((p.center() - geo.barycenter).norm() < 1e-12);
  }
}

TEST_CASE("interpolation reproduces multilinear functions") {
  const Grid g = Grid::centered(Vec::Zero(3), 1.0, 5);
  const auto f = sample(g, [](const Vec& x) { return 1.0 + 2.0 * x[0] - x[1] + 0.5 * x[0] * x[2]; });
  const Vec p = vec({0.13, -0.41, 0.77});
  CHECK(interpolate(f, p) == doctest::Approx(1.0 + 0.26 + 0.41 + 0.5 * 0.13 * 0.77).epsilon(1e-12));
}
