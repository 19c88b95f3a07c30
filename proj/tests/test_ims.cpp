#include <cmath>

#include "ouhardy/ims.hpp"
#include "support.hpp"

using namespace ouh;
using namespace ouh::test;

TEST_CASE("partition members on S1") {
  const auto cfg = s1_config();
  const auto p = build_partition(cfg);
  CHECK(p.members() == 3);
  CHECK(p.r0() == doctest::Approx(1.0));
  CHECK(p.value(0, cfg.poles[0]) == 1.0);
  CHECK(p.value(0, vec({-1.0, 0.4, 0.2})) == 1.0);
  CHECK(p.value(0, vec({0.0, 0.0, 0.0})) == 0.0);
  CHECK(p.value(1, vec({0.0, 0.0, 0.0})) == 0.0);
  CHECK(p.value(2, vec({0.0, 0.0, 0.0})) == 1.0);
  CHECK(p.region(Vec::Zero(3)) == -1);
  CHECK(p.region(vec({0.9, 0.1, 0.0})) == 1);

  SUBCASE("annulus values and ratio") {
    const Vec x = vec({-1.0 + 0.75, 0.0, 0.0});
    CHECK(p.value(0, x) == doctest::Approx(std::cos(M_PI / 4.0)));
    CHECK(p.value(2, x) == doctest::Approx(std::sin(M_PI / 4.0)));
    CHECK(p.ratio(0, x) == doctest::Approx(M_PI * M_PI));
    CHECK(p.ratio_bound() == doctest::Approx(M_PI * M_PI));
  }
  SUBCASE("analytic gradient against central differences") {
    const Vec x = vec({-1.0 + 0.41, 0.37, -0.2});
    const double d = 1e-6;
    for (int m = 0; m < 3; ++m) {
      const Vec g = p.gradient(m, x);
      for (int a = 0; a < 3; ++a) {
        Vec e = Vec::Zero(3);
        e[a] = d;
        CHECK(g[a] == doctest::Approx((p.value(m, x + e) - p.value(m, x - e)) / (2 * d)).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("partition requires two poles, a valid plateau and disjoint supports") {
  expect_kind(ErrorKind::Input, [] { build_partition(s1_config(), 1.0); });
  expect_kind(ErrorKind::Input, [] { build_partition(s1_config(), 0.0); });
  expect_kind(ErrorKind::Input, [] { build_partition(one_pole(Vec::Zero(3), 0.25)); });
  CHECK(parse_profile("smoothstep") == Profile::Smoothstep);
  CHECK(to_string(parse_profile("cosine")) == "cosine");
  expect_kind(ErrorKind::Usage, [] { parse_profile("linear"); });
}

TEST_CASE("partition properties hold at every node") {
  const auto cfg = s1_config();
  const GaussianMeasure mu(cfg);
  const Grid g = make_grid(cfg, mu.geometry(), 33);
  for (const auto profile : {Profile::Cosine, Profile::Smoothstep})
    for (double rho : {0.25, 0.5, 0.75}) {
      const PartitionOfUnity p(cfg, rho, profile);
      const auto c = check_partition(p, g);
      CHECK(c.sum_squares <= 1e-12);
      CHECK(c.orthogonality <= 1e-10);
      CHECK(c.gradient_sum <= 1e-10);
      CHECK(c.ratio_max <= c.ratio_bound * (1.0 + 1e-12));
      CHECK(c.finite_difference <= 1e-6);
      CHECK(c.disjoint);
      CHECK(c.points == g.size());
    }
}

TEST_CASE("three poles on a line") {
  ProblemConfig cfg = s1_config();
  cfg.poles = {vec({-2, 0, 0}), vec({0, 0, 0}), vec({2, 0, 0})};
  const GaussianMeasure mu(cfg);
  const auto p = build_partition(cfg);
  CHECK(p.members() == 4);
  const Grid g = make_grid(cfg, mu.geometry(), 33);
  const auto c = check_partition(p, g);
  CHECK(c.sum_squares <= 1e-12);
  CHECK(c.orthogonality <= 1e-10);
  CHECK(c.gradient_sum <= 1e-10);
}

TEST_CASE("measured localization constant") {
  const auto cfg = s1_config();
  const GaussianMeasure mu(cfg);
  const Grid g = make_grid(cfg, mu.geometry(), 33);
  const auto p = build_partition(cfg);
  const auto small = lemma3_bound(p, g, 1e-6);
  CHECK(small.k_hat == doctest::Approx(M_PI * M_PI).epsilon(1e-5));
  CHECK(small.gradient_part == doctest::Approx(M_PI * M_PI));
  const auto s1 = lemma3_bound(p, g, 0.25);
  CHECK(s1.k_hat >= M_PI * M_PI - 1e-9);
  CHECK_FALSE(s1.below_pi2);

  const PartitionOfUnity wide(cfg, 0.25, Profile::Cosine);
  const auto w = lemma3_bound(wide, g, 1e-3);
  CHECK(w.gradient_part == doctest::Approx(std::pow(M_PI / 1.5, 2)));
  CHECK(w.below_pi2);
}

TEST_CASE("localization identity without potential") {
  const auto cfg = s1_config();
  const GaussianMeasure mu(cfg);
  const Grid g = make_grid(cfg, mu.geometry(), 48);
  const auto p = build_partition(cfg);
  const Bump b{vec({-0.3, 0.2, 0.0}), 1.0, 3.0};
  const auto c = ims_identity_check(b, mu, p, g, 0.0);
  CHECK(c.within_tolerance);
  CHECK(c.coarse.potential_residual == 0.0);
  CHECK(c.fine.residual < c.coarse.residual);
  CHECK(c.observed_order > 1.5);
}

TEST_CASE("localization identity with the potential cancels the potential part") {
  const auto cfg = s1_config();
  const GaussianMeasure mu(cfg);
  const Grid g = make_grid(cfg, mu.geometry(), 41);
  const auto p = build_partition(cfg);
  for (const auto& b : bump_suite(cfg, g, 3, 13)) {
    const auto c = ims_identity_check(b, mu, p, g, 0.25);
    CHECK(std::abs(c.coarse.potential_residual) <= 1e-12 * (1.0 + c.coarse.pieces));
    CHECK(c.coarse.residual <= 5.0 * c.error_estimate);
  }
}

TEST_CASE("field inside one plateau is its own localization") {
  const auto cfg = s1_config();
  const GaussianMeasure mu(cfg);
  const Grid g = make_grid(cfg, mu.geometry(), 41);
  const auto p = build_partition(cfg);
  const Vec a = cfg.poles[1];
  const auto phi = sample(g, [&](const Vec& x) {
    const double r2 = (x - a).squaredNorm();
    return r2 >= 0.16 ? 0.0 : std::pow(0.16 - r2, 3);
  });
  const auto r = ims_identity(phi, mu, p, 0.25, kink_collar(g));
  CHECK(r.gradient_term == 0.0);
  CHECK(r.lhs == doctest::Approx(r.pieces).epsilon(1e-13));
  CHECK(r.residual <= 1e-13 * std::abs(r.lhs));
}

TEST_CASE("lower-bound chain on the bump suite") {
  for (double c : {0.0, 0.125, 0.25}) {
    auto cfg = s1_config();
    cfg.coupling_c = c;
    const GaussianMeasure mu(cfg);
    const Grid g = make_grid(cfg, mu.geometry(), 33);
    const auto p = build_partition(cfg);
    const double k_hat = lemma3_bound(p, g, c).k_hat;
    for (const auto& b : bump_suite(cfg, g, 3, 17)) {
      const auto r = chain_bound(b, mu, p, g, c, k_hat);
      INFO("c = " << c);
      CHECK(r.ok());
      CHECK(r.first_failure() == nullptr);
      CHECK(r.displays.size() == 11);
      CHECK(r.constant_K == doctest::Approx(hardy_constants(cfg).K));
    }
  }
}

TEST_CASE("field in the far region") {
  const auto cfg = s1_config();
  const GaussianMeasure mu(cfg);
  const Grid g = make_grid(cfg, mu.geometry(), 41);
  const auto p = build_partition(cfg);
  const Vec center = vec({0.0, 2.2, 0.0});
  const auto phi = sample(g, [&](const Vec& x) {
    const double r2 = (x - center).squaredNorm();
    return r2 >= 1.0 ? 0.0 : std::pow(1.0 - r2, 3);
  });
  const auto f = q_form(phi, mu, p, 0.25, M_PI * M_PI);
  CHECK(f.mass_far == doctest::Approx(f.mass));
  CHECK(f.far_potential <= 0.5 * f.mass);
  CHECK(f.q >= -0.5 * f.mass);
  for (double q : f.q_pieces) CHECK(q == 0.0);
}
