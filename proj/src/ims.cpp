#include "ouhardy/ims.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ouh {

Profile parse_profile(const std::string& name) {
  if (name == "cosine") return Profile::Cosine;
  if (name == "smoothstep") return Profile::Smoothstep;
  throw Error(ErrorKind::Usage, "unknown partition profile '" + name + "' (expected cosine or smoothstep)");
}

std::string to_string(Profile p) { return p == Profile::Cosine ? "cosine" : "smoothstep"; }

PartitionOfUnity::PartitionOfUnity(const ProblemConfig& cfg, double rho, Profile profile)
    : poles_(cfg.poles), rho_(rho), profile_(profile) {
  const auto g = derive_geometry(cfg);
  if (g.pole_count < 2) throw Error(ErrorKind::Input, "a localization partition needs at least two poles");
  if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorKind::Input, "plateau fraction rho must lie in (0, 1)");
  r0_ = g.r0;
  for (std::size_t i = 0; i < poles_.size(); ++i)
    for (std::size_t j = i + 1; j < poles_.size(); ++j)
      if ((poles_[i] - poles_[j]).norm() < 2.0 * r0_ * (1.0 - 1e-12))
        throw Error(ErrorKind::Geometry, "partition supports overlap");
}

PartitionOfUnity build_partition(const ProblemConfig& cfg, double rho, Profile profile) {
  return PartitionOfUnity(cfg, rho, profile);
}

double PartitionOfUnity::theta(double r, double& dtheta) const {
  const double width = (1.0 - rho_) * r0_;
  const double t = (r - rho_ * r0_) / width;
  if (t <= 0.0) {
    dtheta = 0.0;
    return 0.0;
  }
  if (t >= 1.0) {
    dtheta = profile_ == Profile::Cosine ? 0.5 * M_PI / width : 0.0;
    return 0.5 * M_PI;
  }
  double g, dg;
  if (profile_ == Profile::Cosine) {
    g = t;
    dg = 1.0;
  } else {
    g = t * t * (3.0 - 2.0 * t);
    dg = 6.0 * t * (1.0 - t);
  }
  dtheta = 0.5 * M_PI * dg / width;
  return 0.5 * M_PI * g;
}

int PartitionOfUnity::region(const Vec& x) const {
  for (int i = 0; i < pole_count(); ++i)
    if ((x - poles_[static_cast<std::size_t>(i)]).norm() < r0_) return i;
  return -1;
}

double PartitionOfUnity::value(int member, const Vec& x) const {
  const int n = pole_count();
  if (member < n) {
    const double r = (x - poles_[static_cast<std::size_t>(member)]).norm();
    if (r >= r0_) return 0.0;
    double dt;
    const double th = theta(r, dt);
    return th == 0.0 ? 1.0 : std::cos(th);
  }
  const int i = region(x);
  if (i < 0) return 1.0;
  double dt;
  return std::sin(theta((x - poles_[static_cast<std::size_t>(i)]).norm(), dt));
}

Vec PartitionOfUnity::gradient(int member, const Vec& x) const {
  const int n = pole_count();
  Vec out = Vec::Zero(x.size());
  const int i = member < n ? member : region(x);
  if (i < 0) return out;
  const Vec d = x - poles_[static_cast<std::size_t>(i)];
  const double r = d.norm();
  if (r >= r0_ || r == 0.0) return out;
  double dt;
  const double th = theta(r, dt);
  if (dt == 0.0) return out;
  const double s = member < n ? -std::sin(th) * dt : std::cos(th) * dt;
  return (s / r) * d;
}

double PartitionOfUnity::ratio(int member, const Vec& x) const {
  const double r = (x - poles_[static_cast<std::size_t>(member)]).norm();
  if (r > r0_) return 0.0;
  double dt;
  const double th = theta(r, dt);
  if (th == 0.0) return 0.0;
  // |grad J|^2 / (1 - J^2) = theta'^2 sin^2 / sin^2.
  return dt * dt;
}

double PartitionOfUnity::ratio_bound() const {
  const double gmax = profile_ == Profile::Cosine ? 1.0 : 1.5;
  const double q = 0.5 * M_PI * gmax / ((1.0 - rho_) * r0_);
  return q * q;
}

double PartitionOfUnity::kink_distance(const Vec& x) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& a : poles_) {
    const double r = (x - a).norm();
    d = std::min({d, std::abs(r - rho_ * r0_), std::abs(r - r0_)});
  }
  return d;
}

PartitionCheck check_partition(const PartitionOfUnity& p, const Grid& grid) {
  PartitionCheck c;
  c.ratio_bound = p.ratio_bound();
  const int members = p.members();
  const int n = p.pole_count();
  const int N = grid.dimension();
  const double delta = 1e-5 * p.r0();
  c.fd_step = delta;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((p.poles()[static_cast<std::size_t>(i)] - p.poles()[static_cast<std::size_t>(j)]).norm() < 2.0 * p.r0() * (1.0 - 1e-12))
        c.disjoint = false;

  std::vector<double> J(static_cast<std::size_t>(members));
  std::vector<Vec> G(static_cast<std::size_t>(members));
  grid.for_each_node([&](Index, const Vec& x) {
    ++c.points;
    double s2 = 0.0;
    Vec orth = Vec::Zero(N);
    double gsum = 0.0;
    for (int m = 0; m < members; ++m) {
      J[static_cast<std::size_t>(m)] = p.value(m, x);
      G[static_cast<std::size_t>(m)] = p.gradient(m, x);
      s2 += J[static_cast<std::size_t>(m)] * J[static_cast<std::size_t>(m)];
      orth += J[static_cast<std::size_t>(m)] * G[static_cast<std::size_t>(m)];
      gsum += G[static_cast<std::size_t>(m)].squaredNorm();
    }
    c.sum_squares = std::max(c.sum_squares, std::abs(s2 - 1.0));
    c.orthogonality = std::max(c.orthogonality, orth.cwiseAbs().maxCoeff());

    bool defined = true;
    double rsum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double Ji = J[static_cast<std::size_t>(i)];
      const double gap = 1.0 - Ji * Ji;
      const double g2 = G[static_cast<std::size_t>(i)].squaredNorm();
      if (gap <= 1e-8) {
        if (g2 != 0.0) defined = false;
        continue;
      }
      rsum += g2 / gap;
      c.ratio_max = std::max(c.ratio_max, g2 / gap);
    }
    if (defined) c.gradient_sum = std::max(c.gradient_sum, std::abs(gsum - rsum) / (1.0 + rsum));

    if (p.kink_distance(x) > 10.0 * delta) {
      Vec xp = x, xm = x;
      for (int m = 0; m < members; ++m)
        for (int a = 0; a < N; ++a) {
          xp[a] += delta;
          xm[a] -= delta;
          const double fd = (p.value(m, xp) - p.value(m, xm)) / (2.0 * delta);
          c.finite_difference = std::max(c.finite_difference, std::abs(fd - G[static_cast<std::size_t>(m)][a]));
          xp[a] = x[a];
          xm[a] = x[a];
        }
    }
  });
  return c;
}

KHatReport lemma3_bound(const PartitionOfUnity& p, const Grid& grid, double coupling) {
  const int n = p.pole_count();
  const double r0 = p.r0();
  KHatReport out;
  double best = -std::numeric_limits<double>::infinity();
  double grad_best = 0.0;
  auto consider = [&](int i, int j, const Vec& x) {
    const Vec& ai = p.poles()[static_cast<std::size_t>(i)];
    const Vec& aj = p.poles()[static_cast<std::size_t>(j)];
    const double ri = (x - ai).norm();
    const double rj = (x - aj).norm();
    if (ri > r0 && rj > r0) return;
    const double Ji = p.value(i, x), Jj = p.value(j, x);
    const double rest = std::max(0.0, 1.0 - Ji * Ji - Jj * Jj);
    // One-sided limit from inside the ball that owns x; the other ball is open.
    const double gi = p.ratio(i, x), gj = p.ratio(j, x);
    const double grad = std::max(ri <= r0 ? gi + (rj < r0 ? gj : 0.0) : 0.0, rj <= r0 ? gj + (ri < r0 ? gi : 0.0) : 0.0);
    const double pot = rest > 0.0 ? coupling * rest * (1.0 / (ri * ri) + 1.0 / (rj * rj)) : 0.0;
    const double v = grad + pot;
    grad_best = std::max(grad_best, grad);
    if (v > best) {
      best = v;
      out.argmax = x;
    }
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      grid.for_each_node([&](Index, const Vec& x) { consider(i, j, x); });
      // Where the two closed supports touch.
      consider(i, j, 0.5 * (p.poles()[static_cast<std::size_t>(i)] + p.poles()[static_cast<std::size_t>(j)]));
    }
  out.k_hat = r0 * r0 * best - 2.0 * coupling;
  out.gradient_part = r0 * r0 * grad_best;
  out.below_pi2 = out.k_hat < M_PI * M_PI - 1e-9;
  return out;
}

double kink_collar(const Grid& grid) { return grid.spacing(); }

namespace {

struct LocalTerms {
  double dirichlet = 0.0;
  double potential = 0.0;
};

LocalTerms local_terms(const Eigen::VectorXd& psi, const Grid& g, const Eigen::VectorXd& wmu,
                       const Eigen::VectorXd& mask_mu, const std::vector<Vec>& poles, double coupling) {
  const ScalarField f{g, psi, 0.0};
  const auto grad = gradient(f);
  Eigen::VectorXd g2 = Eigen::VectorXd::Zero(g.size());
  for (const auto& c : grad.components) g2.array() += c.array().square();
  LocalTerms t;
  t.dirichlet = g2.dot(wmu);
  if (coupling != 0.0) {
    const Eigen::VectorXd v = psi.array().square() * mask_mu.array();
    t.potential = coupling * inverse_square_integral(ScalarField{g, v, 0.0}, poles);
  }
  return t;
}

}  // namespace

IdentityReport ims_identity(const ScalarField& phi, const GaussianMeasure& measure, const PartitionOfUnity& p,
                            double coupling, double collar) {
  const Grid& g = phi.grid;
  const int members = p.members();
  const Eigen::VectorXd mu = measure.density_on(g);
  const Eigen::VectorXd w = quadrature_weights(g);
  Eigen::VectorXd mask(g.size());
  std::vector<Eigen::VectorXd> J(static_cast<std::size_t>(members), Eigen::VectorXd(g.size()));
  Eigen::VectorXd gsum(g.size());
  g.for_each_node([&](Index i, const Vec& x) {
    mask[i] = p.kink_distance(x) < collar ? 0.0 : 1.0;
    double s = 0.0;
    for (int m = 0; m < members; ++m) {
      J[static_cast<std::size_t>(m)][i] = p.value(m, x);
      s += p.gradient(m, x).squaredNorm();
    }
    gsum[i] = s;
  });
  const Eigen::VectorXd mask_mu = mask.cwiseProduct(mu);
  const Eigen::VectorXd wmu = w.cwiseProduct(mask_mu);
  const auto& poles = measure.config().poles;

  IdentityReport r;
  r.resolution = g.spacing();
  const auto whole = local_terms(phi.values, g, wmu, mask_mu, poles, coupling);
  r.lhs = whole.dirichlet - whole.potential;
  double vsum = 0.0;
  for (int m = 0; m < members; ++m) {
    const auto t = local_terms(J[static_cast<std::size_t>(m)].cwiseProduct(phi.values), g, wmu, mask_mu, poles, coupling);
    r.pieces += t.dirichlet - t.potential;
    vsum += t.potential;
  }
  r.gradient_term = (phi.values.array().square() * gsum.array() * wmu.array()).sum();
  r.rhs = r.pieces - r.gradient_term;
  r.potential_residual = vsum - whole.potential;
  r.residual = std::abs(r.lhs - r.rhs);
  return r;
}

IdentityCheck ims_identity_check(const std::function<double(const Vec&)>& phi, const GaussianMeasure& measure,
                                 const PartitionOfUnity& p, const Grid& grid, double coupling) {
  const double collar = kink_collar(grid);
  const Grid fine = grid.refined();
  const ScalarField phi_fine = sample(fine, phi);
  IdentityCheck c;
  c.coarse = ims_identity(sample(grid, phi), measure, p, coupling, collar);
  c.fine = ims_identity(phi_fine, measure, p, coupling, collar);
  c.error_estimate = std::abs(c.coarse.lhs - c.fine.lhs) + std::abs(c.coarse.rhs - c.fine.rhs);
  c.observed_order = c.fine.residual > 0.0 ? std::log2(c.coarse.residual / c.fine.residual) : INFINITY;
  const double floor = 1e-13 * (1.0 + std::abs(c.coarse.lhs));
  c.within_tolerance = c.coarse.residual <= 5.0 * c.error_estimate + floor;
  if (!c.within_tolerance)
    throw Error(ErrorKind::IdentityViolation, "localization identity residual " + std::to_string(c.coarse.residual) +
                                                  " exceeds five times the discretization error " +
                                                  std::to_string(c.error_estimate));
  return c;
}

FormReport q_form(const ScalarField& phi, const GaussianMeasure& measure, const PartitionOfUnity& p, double coupling,
                  double k_hat) {
  const Grid& g = phi.grid;
  const int n = p.pole_count();
  const double r0 = p.r0();
  const auto& poles = measure.config().poles;
  const Eigen::VectorXd mu = measure.density_on(g);
  const Eigen::VectorXd w = quadrature_weights(g);
  const Eigen::VectorXd wmu = w.cwiseProduct(mu);

  std::vector<Eigen::VectorXd> J(static_cast<std::size_t>(n + 1), Eigen::VectorXd(g.size()));
  Eigen::VectorXd F(g.size()), gsum(g.size()), far_v(g.size());
  Eigen::VectorXi region(g.size());
  g.for_each_node([&](Index i, const Vec& x) {
    double f = 0.0, s = 0.0;
    for (int m = 0; m <= n; ++m) {
      J[static_cast<std::size_t>(m)][i] = p.value(m, x);
      s += p.gradient(m, x).squaredNorm();
    }
    for (int m = 0; m < n; ++m) f += p.ratio(m, x);
    F[i] = f;
    gsum[i] = s;
    region[i] = p.region(x);
    far_v[i] = region[i] < 0 ? potential(x, poles, coupling) : 0.0;
  });

  FormReport r;
  r.resolution = g.spacing();
  const Eigen::VectorXd phi2 = phi.values.array().square();
  const auto whole = local_terms(phi.values, g, wmu, mu, poles, coupling);
  r.q = whole.dirichlet - whole.potential;
  for (int m = 0; m < n; ++m) {
    const auto t = local_terms(J[static_cast<std::size_t>(m)].cwiseProduct(phi.values), g, wmu, mu, poles, coupling);
    r.q_pieces.push_back(t.dirichlet - t.potential);
  }
  const auto comp = local_terms(J[static_cast<std::size_t>(n)].cwiseProduct(phi.values), g, wmu, mu, poles, coupling);
  r.gradient_term = (phi2.array() * gsum.array() * wmu.array()).sum();
  r.remainder = comp.dirichlet - comp.potential - r.gradient_term;
  r.complement_potential = comp.potential;
  r.ratio_term = (phi2.array() * F.array() * wmu.array()).sum();
  r.mass = phi2.dot(wmu);
  r.mass_in.assign(static_cast<std::size_t>(n), 0.0);
  r.mass_local.assign(static_cast<std::size_t>(n), 0.0);
  for (Index i = 0; i < g.size(); ++i) {
    const double v = phi2[i] * wmu[i];
    const int reg = region[i];
    if (reg < 0) {
      r.mass_far += v;
      r.far_potential += far_v[i] * v;
      continue;
    }
    const double Jr = J[static_cast<std::size_t>(reg)][i];
    r.mass_in[static_cast<std::size_t>(reg)] += v;
    r.mass_local[static_cast<std::size_t>(reg)] += Jr * Jr * v;
    r.rn_weight += ((k_hat + 2.0 * coupling) + (n - 2) * coupling * (1.0 - Jr * Jr)) / (r0 * r0) * v;
  }
  return r;
}

bool ChainReport::ok() const {
  return std::all_of(displays.begin(), displays.end(), [](const DisplayCheck& d) { return d.holds; });
}

const DisplayCheck* ChainReport::first_failure() const {
  for (const auto& d : displays)
    if (!d.holds) return &d;
  return nullptr;
}

ChainReport chain_bound(const std::function<double(const Vec&)>& phi, const GaussianMeasure& measure,
                        const PartitionOfUnity& p, const Grid& grid, double coupling, double k_hat) {
  ChainReport c;
  c.k_hat = k_hat;
  c.coarse = q_form(sample(grid, phi), measure, p, coupling, k_hat);
  const Grid fine_grid = grid.refined();
  c.fine = q_form(sample(fine_grid, phi), measure, p, coupling, k_hat);
  const int n = p.pole_count();
  const double r0 = p.r0();
  const double half_tr = 0.5 * measure.geometry().trace_a;
  auto cfg = measure.config();
  cfg.coupling_c = coupling;
  c.constant_internal = (k_hat + (n + 1) * coupling) / (r0 * r0) + half_tr;
  c.constant_K = hardy_constants(cfg).K;

  auto sum = [](const std::vector<double>& v) { double s = 0.0; for (double x : v) s += x; return s; };
  // Each side as a function of a report, so the tolerance can use both levels.
  using Side = std::function<double(const FormReport&)>;
  auto add = [&](const std::string& name, const Side& lhs, const Side& rhs, bool equality) {
    DisplayCheck d;
    d.name = name;
    d.lhs = lhs(c.fine);
    d.rhs = rhs(c.fine);
    d.tolerance = std::abs(lhs(c.coarse) - d.lhs) + std::abs(rhs(c.coarse) - d.rhs) +
                  1e-12 * (1.0 + std::abs(d.lhs) + std::abs(d.rhs));
    d.holds = equality ? std::abs(d.lhs - d.rhs) <= d.tolerance : d.lhs >= d.rhs - d.tolerance;
    c.displays.push_back(d);
  };

  add("decomposition Q = sum Q[J_i phi] + R_n", [](const FormReport& f) { return f.q; },
      [&](const FormReport& f) { return sum(f.q_pieces) + f.remainder; }, true);
  add("R_n >= -c int V (1 - sum J_i^2) phi^2 - sum int F_i phi^2", [](const FormReport& f) { return f.remainder; },
      [](const FormReport& f) { return -f.complement_potential - f.ratio_term; }, false);
  add("R_n >= -sum int_Omega_i [(k+2c) + (n-2)c(1-J_i^2)]/r0^2 phi^2 - cn/r0^2 int_Gamma phi^2",
      [](const FormReport& f) { return f.remainder; },
      [&](const FormReport& f) { return -f.rn_weight - coupling * n / (r0 * r0) * f.mass_far; }, false);
  add("V <= cn/r0^2 on Gamma", [&](const FormReport& f) { return coupling * n / (r0 * r0) * f.mass_far; },
      [](const FormReport& f) { return f.far_potential; }, false);
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    add("Q[J_" + std::to_string(i + 1) + " phi] >= -[Tr A/2 + (n-1)c/r0^2] int |J_i phi|^2",
        [k](const FormReport& f) { return f.q_pieces[k]; },
        [&, k](const FormReport& f) { return -(half_tr + (n - 1) * coupling / (r0 * r0)) * f.mass_local[k]; }, false);
  }
  add("sum Q[J_i phi] >= -Tr A/2 sum int_Omega_i phi^2 - (n-1)c/r0^2 sum int J_i^2 phi^2",
      [&](const FormReport& f) { return sum(f.q_pieces); },
      [&](const FormReport& f) { return -half_tr * sum(f.mass_in) - (n - 1) * coupling / (r0 * r0) * sum(f.mass_local); },
      false);

  // Pointwise algebra k + 2c + c(n-2)(1-J^2) + c(n-1)J^2 = k + cn + cJ^2 <= k + c(n+1).
  {
    double worst_identity = 0.0, worst_bound = -std::numeric_limits<double>::infinity();
    fine_grid.for_each_node([&](Index, const Vec& x) {
      const int reg = p.region(x);
      if (reg < 0) return;
      const double J = p.value(reg, x);
      const double lhs = k_hat + 2 * coupling + coupling * (n - 2) * (1 - J * J) + coupling * (n - 1) * J * J;
      const double mid = k_hat + coupling * n + coupling * J * J;
      worst_identity = std::max(worst_identity, std::abs(lhs - mid));
      worst_bound = std::max(worst_bound, mid - (k_hat + coupling * (n + 1)));
    });
    DisplayCheck d;
    d.name = "k + cn + cJ_i^2 <= k + c(n+1)";
    d.lhs = 0.0;
    d.rhs = worst_bound;
    d.tolerance = 1e-12 * (1.0 + std::abs(k_hat));
    d.holds = worst_identity <= d.tolerance && worst_bound <= d.tolerance;
    c.displays.push_back(d);
  }

  add("Q >= -sum int_Omega_i [...] phi^2 - cn/r0^2 int_Gamma phi^2", [](const FormReport& f) { return f.q; },
      [&](const FormReport& f) {
        double s = -f.rn_weight - coupling * n / (r0 * r0) * f.mass_far - half_tr * sum(f.mass_in);
        s -= (n - 1) * coupling / (r0 * r0) * sum(f.mass_local);
        return s;
      },
      false);
  add("Q >= -[(k + (n+1)c)/r0^2 + Tr A/2] int phi^2", [](const FormReport& f) { return f.q; },
      [&](const FormReport& f) { return -c.constant_internal * f.mass; }, false);
  add("Q >= -K int phi^2", [](const FormReport& f) { return f.q; },
      [&](const FormReport& f) { return -c.constant_K * f.mass; }, false);
  return c;
}

}  // namespace ouh
