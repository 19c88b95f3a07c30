#include "ouhardy/measure.hpp"

#include <cmath>
#include <algorithm>
#include <limits>
#include <random>

namespace ouh {

double sphere_area(int dimension) {
  return 2.0 * std::pow(M_PI, dimension / 2.0) / std::tgamma(dimension / 2.0);
}

double gamma_moment(double beta, int dimension) {
  const double s = beta + dimension / 2.0;
  if (!(s > 0.0)) throw Error(ErrorKind::DivergentMoment, "moment requires beta + N/2 > 0");
  return sphere_area(dimension) * std::pow(2.0, s - 1.0) * std::tgamma(s);
}

GaussianMeasure::GaussianMeasure(const ProblemConfig& cfg) : cfg_(cfg), geometry_(derive_geometry(cfg)) {
  const int n = geometry_.pole_count;
  const int N = geometry_.dimension;
  const Mat& A = cfg_.matrix_a;
  precision_ = n * A;
  const Vec& abar = geometry_.barycenter;
  offset_ = -n * abar.dot(A * abar);
  for (const auto& a : cfg_.poles) offset_ += a.dot(A * a);
  normalization_ = std::exp(0.5 * offset_) * std::pow(n / (2.0 * M_PI), N / 2.0) * std::sqrt(geometry_.det_a);

  Eigen::LLT<Mat> llt(precision_);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::DefiniteMatrix, "Cholesky factorization of nA failed");
  // x = abar + L^{-T} z has covariance (L L^T)^{-1}.
  sample_factor_ = llt.matrixU().solve(Mat::Identity(N, N));
}

double GaussianMeasure::log_weight(const Vec& x) const {
  const Vec y = x - barycenter();
  return -0.5 * y.dot(precision_ * y) - 0.5 * offset_;
}

double GaussianMeasure::weight(const Vec& x) const { return std::exp(log_weight(x)); }

double GaussianMeasure::density(const Vec& x) const { return normalization_ * weight(x); }

Vec GaussianMeasure::drift(const Vec& x) const { return -(precision_ * (x - barycenter())); }

double GaussianMeasure::drift_gap(const Vec& x) const {
  const Vec b = precision_ * (x - barycenter());
  return 0.5 * pole_count() * geometry_.trace_a - 0.25 * b.squaredNorm();
}

std::vector<Vec> GaussianMeasure::sample(Index count, std::uint64_t seed) const {
  if (count < 1) throw Error(ErrorKind::Input, "sample count must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int N = dimension();
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(count));
  Vec z(N);
  for (Index k = 0; k < count; ++k) {
    for (int d = 0; d < N; ++d) z[d] = normal(rng);
    out.push_back(barycenter() + sample_factor_ * z);
  }
  return out;
}

EquivalenceBounds GaussianMeasure::equivalence_bounds(int pole) const {
  const int n = pole_count();
  if (pole < 0 || pole >= n) throw Error(ErrorKind::Input, "pole index out of range");
  EquivalenceBounds b;
  b.pole = pole;
  b.alpha1 = geometry_.alpha1;
  b.alpha2 = geometry_.alpha2;
  b.alpha1_tilde = b.alpha1 * (n + 1) / 2.0;
  b.alpha2_tilde = b.alpha2 * (2 * n - 1);
  for (int j = 0; j < n; ++j)
    if (j != pole) b.pair_sum += (cfg_.poles[pole] - cfg_.poles[j]).squaredNorm();
  b.c1 = std::exp(-b.alpha2 * b.pair_sum);
  b.c2 = std::exp(0.5 * b.alpha1 * b.pair_sum);
  return b;
}

Eigen::VectorXd GaussianMeasure::density_on(const Grid& grid) const {
  Eigen::VectorXd out(grid.size());
  grid.for_each_node([&](Index i, const Vec& x) { out[i] = density(x); });
  return out;
}

double normalization_by_quadrature(const GaussianMeasure& measure, const Grid& grid) {
  Eigen::VectorXd w(grid.size());
  grid.for_each_node([&](Index i, const Vec& x) { w[i] = measure.weight(x); });
  return 1.0 / tensor_quadrature(w, grid);
}

NormalizationCheck check_normalization(const GaussianMeasure& measure, const Grid& grid, double tolerance) {
  NormalizationCheck r;
  r.closed_form = measure.normalization();
  r.quadrature = normalization_by_quadrature(measure, grid);
  r.relative_error = std::abs(r.quadrature - r.closed_form) / r.closed_form;
  if (!(r.relative_error <= tolerance))
    throw Error(ErrorKind::Consistency, "closed-form and quadrature normalization differ by " +
                                            std::to_string(r.relative_error) + " (relative)");
  return r;
}

double weighted_integral(const ScalarField& f, const GaussianMeasure& measure) {
  const Grid& g = f.grid;
  Eigen::VectorXd integrand(g.size());
  g.for_each_node([&](Index i, const Vec& x) {
    const double v = f.values[i];
    if (!std::isfinite(v))
      throw Error(ErrorKind::Input, "integrand is not finite at a grid node; singular integrands need "
                                    "singular_quadrature");
    integrand[i] = v * measure.density(x);
  });
  return tensor_quadrature(integrand, g);
}

double weighted_integral(const std::function<double(const Vec&)>& f, const GaussianMeasure& measure,
                         const Grid& grid) {
  return weighted_integral(sample(grid, f), measure);
}

MonteCarloEstimate weighted_integral_mc(const std::function<double(const Vec&)>& f, const GaussianMeasure& measure,
                                        Index samples, std::uint64_t seed) {
  const auto pts = measure.sample(samples, seed);
  // Welford accumulation keeps the variance stable for large sample counts.
  double mean = 0.0, m2 = 0.0;
  Index k = 0;
  for (const auto& x : pts) {
    const double v = f(x);
    if (!std::isfinite(v)) throw Error(ErrorKind::Input, "integrand is not finite at a sample point");
    ++k;
    const double d = v - mean;
    mean += d / k;
    m2 += d * (v - mean);
  }
  MonteCarloEstimate e;
  e.mean = mean;
  e.samples = k;
  e.standard_error = k > 1 ? std::sqrt(m2 / (k - 1) / k) : 0.0;
  return e;
}

SingularIntegral singular_quadrature(const ScalarField& smooth, const Vec& pole, double beta,
                                     const SingularOptions& options) {
  const Grid& g = smooth.grid;
  const int N = g.dimension();
  const double p = 2.0 * beta + N;
  if (!(p > 0.0)) throw Error(ErrorKind::DivergentMoment, "|x-a|^{2 beta} is not integrable: 2 beta + N <= 0");
  if (!g.contains_strictly(pole)) throw Error(ErrorKind::Input, "singular point must lie inside the grid box");

  SingularIntegral out;
  const double h = g.spacing();
  const Eigen::VectorXd w = quadrature_weights(g);
  out.pole_value = interpolate(smooth, pole);

  if (beta >= 0.0) {
    double sum = 0.0;
    g.for_each_node([&](Index i, const Vec& x) { sum += w[i] * smooth.values[i] * std::pow((x - pole).squaredNorm(), beta); });
    out.raw = out.radial = out.subtracted = sum;
    return out;
  }

  const double eps = options.excision_factor * h;
  out.excision_radius = eps;
  double dist = std::numeric_limits<double>::infinity();
  for (int a = 0; a < N; ++a)
    dist = std::min({dist, pole[a] - g.origin()[a], g.coordinate(a, g.points_per_axis() - 1) - pole[a]});
  const double s = options.reference_width > 0.0 ? options.reference_width : std::max(dist / 6.0, 3.0 * h);
  const double inv2s2 = 1.0 / (2.0 * s * s);
  const double eps2 = eps * eps;

  // The remainder (f - f(a) g) |x-a|^{2 beta} is summed over every node but the pole itself.
  double raw = 0.0, remainder = 0.0;
  const double tiny = 1e-18 * h * h;
  g.for_each_node([&](Index i, const Vec& x) {
    const double r2 = (x - pole).squaredNorm();
    if (r2 <= tiny) return;
    const double sing = std::pow(r2, beta);
    remainder += w[i] * (smooth.values[i] - out.pole_value * std::exp(-r2 * inv2s2)) * sing;
    if (r2 >= eps2) raw += w[i] * smooth.values[i] * sing;
  });
  const double ref_exact = std::pow(s, p) * gamma_moment(beta, N);
  out.raw = raw;
  out.radial = raw + out.pole_value * sphere_area(N) * std::pow(eps, p) / p;
  out.subtracted = remainder + out.pole_value * ref_exact;
  return out;
}

void moment_bracket(double beta, int pole, const GaussianMeasure& measure, double& lower, double& upper) {
  const int N = measure.dimension();
  const double s = beta + N / 2.0;
  if (!(s > 0.0)) throw Error(ErrorKind::DivergentMoment, "moment requires beta + N/2 > 0");
  const auto b = measure.equivalence_bounds(pole);
  const double base = sphere_area(N) * std::tgamma(s);
  lower = b.c1 * std::pow(2.0, s - 1.0) * std::pow(b.alpha2_tilde, -s) * base;
  upper = b.c2 * std::pow(2.0, 2.0 * beta + N - 1.0) * std::pow(b.alpha1_tilde, -s) * base;
}

MomentReport moment_bounds(double beta, int pole, const GaussianMeasure& measure, const Grid& grid) {
  MomentReport r;
  r.beta = beta;
  r.pole = pole;
  r.sigma_n = sphere_area(measure.dimension());
  r.resolution = grid.spacing();
  moment_bracket(beta, pole, measure, r.lower, r.upper);
  ScalarField w = sample(grid, [&](const Vec& x) { return measure.weight(x); });
  const auto s = singular_quadrature(w, measure.config().poles[pole], beta);
  r.value = s.subtracted;
  r.raw = s.raw;
  r.radial = s.radial;
  if (!(r.lower <= r.value && r.value <= r.upper))
    throw Error(ErrorKind::InequalityViolation, "moment I(" + std::to_string(beta) + ") = " + std::to_string(r.value) +
                                                    " escapes its closed-form bracket");
  return r;
}

MonteCarloEstimate moment_monte_carlo(double beta, int pole, const GaussianMeasure& measure, Index samples,
                                      std::uint64_t seed) {
  const Vec a = measure.config().poles[pole];
  auto est = weighted_integral_mc([&](const Vec& x) { return std::pow((x - a).squaredNorm(), beta); }, measure,
                                  samples, seed);
  est.mean /= measure.normalization();
  est.standard_error /= measure.normalization();
  return est;
}

EquivalenceReport equivalence_check(int pole, const GaussianMeasure& measure, const std::vector<Vec>& points) {
  EquivalenceReport r;
  r.pole = pole;
  r.bounds = measure.equivalence_bounds(pole);
  r.points = static_cast<Index>(points.size());
  r.min_lower_margin = std::numeric_limits<double>::infinity();
  r.min_upper_margin = std::numeric_limits<double>::infinity();
  const auto& cfg = measure.config();
  const Mat& A = cfg.matrix_a;
  const Vec& ai = cfg.poles[pole];
  for (const auto& x : points) {
    double q = 0.0;  // sum_j |A^{1/2}(x - a_j)|^2
    for (const auto& a : cfg.poles) q += (x - a).dot(A * (x - a));
    const double log_mid = -0.5 * q;
    const double d2 = (x - ai).squaredNorm();
    const double log_lo = std::log(r.bounds.c1) - 0.5 * r.bounds.alpha2_tilde * d2;
    const double log_hi = std::log(r.bounds.c2) - 0.5 * r.bounds.alpha1_tilde * d2;
    const double scale = 1.0 + std::abs(log_mid);
    r.min_lower_margin = std::min(r.min_lower_margin, (log_mid - log_lo) / scale);
    r.min_upper_margin = std::min(r.min_upper_margin, (log_hi - log_mid) / scale);
  }
  if (r.min_lower_margin < -kInequalityTolerance || r.min_upper_margin < -kInequalityTolerance)
    throw Error(ErrorKind::InequalityViolation, "weight equivalence violated for pole " + std::to_string(pole));
  return r;
}

AppendixReport appendix_check(int pole, const Vec& x, const std::vector<Vec>& poles) {
  const int n = static_cast<int>(poles.size());
  if (n < 2) throw Error(ErrorKind::Input, "distance estimates need at least two poles");
  if (pole < 0 || pole >= n) throw Error(ErrorKind::Input, "pole index out of range");
  double pair = 0.0;
  for (int j = 0; j < n; ++j)
    if (j != pole) pair += (poles[pole] - poles[j]).squaredNorm();
  double mid = 0.0;
  for (const auto& a : poles) mid += (x - a).squaredNorm();
  const double d2 = (x - poles[pole]).squaredNorm();
  AppendixReport r;
  r.pole = pole;
  r.lower = -pair + 0.5 * (n + 1) * d2;
  r.middle = mid;
  r.upper = (2 * n - 1) * d2 + 2.0 * pair;
  r.margin = std::min(r.middle - r.lower, r.upper - r.middle);
  const double scale = 1.0 + std::abs(r.upper) + std::abs(r.lower);
  if (r.margin < -kInequalityTolerance * scale)
    throw Error(ErrorKind::InequalityViolation, "distance estimate violated for pole " + std::to_string(pole));
  return r;
}

}  // namespace ouh
