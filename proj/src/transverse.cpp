#include "dnstrip/transverse.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>

#include "dnstrip/errors.hpp"

namespace dnstrip {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kQuarterPi2 = kPi * kPi / 4.0;
}  // namespace

std::vector<double> dn_eigenvalues_1d(int count) {
  if (count < 1) throw InvalidInput("dn_eigenvalues_1d: count must be positive");
  std::vector<double> out(count);
  for (int j = 1; j <= count; ++j) {
    const double m = (2.0 * j - 1.0) * kPi / 2.0;
    out[j - 1] = m * m;
  }
  return out;
}

double solve_nu0(double alpha) {
  if (!std::isfinite(alpha)) throw InvalidInput("solve_nu0: alpha must be finite");
  if (alpha < 0.0) throw HypothesisViolation("solve_nu0: alpha < 0 (negative geodesic curvature) is out of scope");
  if (alpha == 0.0) return kQuarterPi2;
  // g(mu) = mu cos mu + alpha sin mu is positive at pi/2, negative at pi and
  // has the same root as mu + alpha tan mu on the open interval.
  double lo = kPi / 2.0;
  double hi = kPi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double g = mid * std::cos(mid) + alpha * std::sin(mid);
    if (g > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double mu = 0.5 * (lo + hi);
  return mu * mu;
}

double nu0_residual(double alpha) {
  const double mu = std::sqrt(solve_nu0(alpha));
  if (alpha == 0.0) return 0.0;
  // cos-multiplied form: tan mu blows up at the small-alpha root near pi/2.
  return std::abs(mu * std::cos(mu) + alpha * std::sin(mu)) / (1.0 + alpha);
}

double robin_alpha(const StripProfile& profile, double epsilon, double s) {
  const double k = profile.kappa_g(s);
  const double h1 = 1.0 - epsilon * k;
  if (!(h1 > 0.0)) throw InvalidInput("robin_alpha: eps kappa_g >= 1, weight vanishes");
  return epsilon * k / (2.0 * h1);
}

DiagonalPencil discretize(const WeightedProblem& problem, int cells) {
  if (cells < 16) throw InvalidInput("transverse discretization needs at least 16 cells");
  const double h = 1.0 / cells;
  DiagonalPencil P;
  P.stiffness.diag.assign(cells, 0.0);
  P.stiffness.off.assign(cells - 1, 0.0);
  P.mass.assign(cells, 0.0);
  // Unknown k is the node t = (k + 1) h.
  for (int c = 0; c < cells; ++c) {
    const double pm = problem.p((c + 0.5) * h) / h;
    if (!(pm > 0.0)) throw InvalidInput("transverse stiffness weight must be positive");
    if (c > 0) P.stiffness.diag[c - 1] += pm;
    P.stiffness.diag[c] += pm;
    if (c > 0) P.stiffness.off[c - 1] -= pm;
  }
  for (int k = 0; k < cells; ++k) {
    const double t = (k + 1) * h;
    const double share = k + 1 == cells ? 0.5 * h : h;
    P.mass[k] = problem.w(t) * share;
    if (problem.q) P.stiffness.diag[k] += problem.q(t) * share;
  }
  P.stiffness.diag[cells - 1] += problem.robin;
  return P;
}

std::vector<double> richardson_eigenvalues(const WeightedProblem& problem, int cells, int count) {
  const auto coarse = discretize(problem, cells).lowest(count);
  const auto fine = discretize(problem, 2 * cells).lowest(count);
  std::vector<double> out(coarse.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
  return out;
}

double lambda0_transverse(const StripProfile& profile, double epsilon, double s, int resolution) {
  if (!(epsilon > 0.0)) throw InvalidInput("lambda0_transverse: epsilon must be positive");
  if (resolution < 64) throw InvalidInput("lambda0_transverse: resolution must be at least 64");
  const double k = profile.kappa_g(s);
  if (epsilon * k >= 1.0) throw InvalidInput("lambda0_transverse: eps kappa_g >= 1, weight vanishes");
  WeightedProblem wp;
  wp.p = [=](double t) { return 1.0 - epsilon * t * k; };
  wp.w = wp.p;
  return richardson_eigenvalues(wp, resolution, 1)[0];
}

double sigma_transverse(const StripProfile& profile, double epsilon, double s, int resolution) {
  if (!(epsilon > 0.0)) throw InvalidInput("sigma_transverse: epsilon must be positive");
  if (resolution < 64) throw InvalidInput("sigma_transverse: resolution must be at least 64");
  const double k = profile.kappa_g(s);
  const double tau = profile.tau(s);
  if (epsilon * k >= 1.0) throw InvalidInput("sigma_transverse: eps kappa_g >= 1");
  WeightedProblem wp;
  wp.p = [=](double t) {
    const double a = 1.0 - epsilon * t * k;
    const double b = epsilon * t * tau;
    return std::sqrt(a * a + b * b);
  };
  wp.w = wp.p;
  return richardson_eigenvalues(wp, resolution, 1)[0];
}

double beta_coefficient(const StripProfile& profile, double epsilon, double s) {
  const double k = profile.kappa_g(s);
  const double tau = profile.tau(s);
  const double a = 1.0 - epsilon * k;
  const double first = (epsilon * k - epsilon * epsilon * k * k - epsilon * epsilon * tau * tau) /
                       std::sqrt(a * a + epsilon * epsilon * tau * tau);
  // Composite Simpson with 64 intervals for int_0^1 f_tt chi_1^2 dt.
  const int m = 64;
  const double h = 1.0 / m;
  double sum = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double t = i * h;
    const double chi = std::sqrt(2.0) * std::sin(kPi * t / 2.0);
    const double ftt = metric_jet(epsilon, epsilon * epsilon, t, k, 0.0, tau, 0.0).dtt;
    const double wgt = (i == 0 || i == m) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    sum += wgt * ftt * chi * chi;
  }
  return first + 0.5 * sum * h / 3.0;
}

double r_function(double x) {
  if (!(x >= 0.0 && x < 0.8)) throw InvalidInput("r_function: x must lie in [0, 4/5)");
  return x * x * (2.0 - x) / (4.0 * (1.0 - x) * (1.0 - x) * (4.0 - 5.0 * x));
}

double find_x0() {
  static const double x0 = [] {
    double lo = 0.0;
    double hi = 0.8;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (r_function(mid) < kQuarterPi2) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    // Pick the endpoint with the smaller residual.
    return std::abs(r_function(lo) - kQuarterPi2) <= std::abs(r_function(hi) - kQuarterPi2) ? lo : hi;
  }();
  return x0;
}

namespace {

WeightedProblem robin_problem(const RobinProblem& problem) {
  WeightedProblem wp;
  wp.p = [](double) { return 1.0; };
  wp.w = wp.p;
  wp.q = problem.potential;
  wp.robin = problem.robin_alpha;
  return wp;
}

}  // namespace

RobinResult robin_first_eigenvalue_raw(const RobinProblem& problem, int resolution) {
  if (resolution < 16) throw InvalidInput("robin_first_eigenvalue: resolution must be at least 16");
  const DiagonalPencil P = discretize(robin_problem(problem), resolution);
  RobinResult r;
  r.eigenvalue = P.lowest(1)[0];
  const auto v = P.eigenvector(r.eigenvalue);
  double nrm = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) nrm += P.mass[i] * v[i] * v[i];
  r.norm_sq = nrm;
  r.boundary_value_sq = v.back() * v.back();
  return r;
}

RobinResult robin_first_eigenvalue(const RobinProblem& problem, int resolution) {
  if (resolution < 64) throw InvalidInput("robin_first_eigenvalue: resolution must be at least 64");
  const RobinResult c = robin_first_eigenvalue_raw(problem, resolution);
  const RobinResult f = robin_first_eigenvalue_raw(problem, 2 * resolution);
  RobinResult r;
  r.eigenvalue = (4.0 * f.eigenvalue - c.eigenvalue) / 3.0;
  r.norm_sq = 1.0;
  r.boundary_value_sq = (4.0 * f.boundary_ratio() - c.boundary_ratio()) / 3.0;
  return r;
}

std::vector<double> effective_limit_check(const std::function<double(double)>& V, const std::vector<double>& mu_list,
                                          int j, double half_length, int resolution) {
  if (j < 1) throw InvalidInput("effective_limit_check: j is 1-based");
  if (resolution < 16) throw InvalidInput("effective_limit_check: resolution must be at least 16");
  const double h = 2.0 * half_length / resolution;
  const int n = resolution - 1;
  std::vector<double> out;
  for (double mu : mu_list) {
    if (!(mu > 0.0)) throw InvalidInput("effective_limit_check: mu must be positive");
    Tridiagonal T;
    T.diag.resize(n);
    T.off.assign(n - 1, -1.0 / (h * h));
    for (int i = 0; i < n; ++i) T.diag[i] = 2.0 / (h * h) + mu * V(-half_length + (i + 1) * h);
    out.push_back(tridiagonal_lowest(T, j)[j - 1] / mu);
  }
  return out;
}

std::vector<TransverseRow> transverse_table(const StripProfile& profile, double epsilon, const std::vector<double>& s,
                                            int resolution) {
  std::vector<TransverseRow> rows;
  rows.reserve(s.size());
  for (double si : s) {
    TransverseRow r;
    r.s = si;
    r.alpha = robin_alpha(profile, epsilon, si);
    if (r.alpha >= 0.0) {
      r.nu0 = solve_nu0(r.alpha);
    } else {
      r.nu0 = robin_first_eigenvalue(RobinProblem{{}, r.alpha}, resolution).eigenvalue;
    }
    r.lambda0 = lambda0_transverse(profile, epsilon, si, resolution);
    r.beta = beta_coefficient(profile, epsilon, si);
    r.gap = r.lambda0 - kQuarterPi2;
    rows.push_back(r);
  }
  return rows;
}

void write_transverse_csv(std::ostream& out, const std::vector<TransverseRow>& rows) {
  out << "s,alpha,nu0,lambda0,beta,gap\n";
  out << std::setprecision(12);
  for (const auto& r : rows) {
    out << r.s << ',' << r.alpha << ',' << r.nu0 << ',' << r.lambda0 << ',' << r.beta << ',' << r.gap << '\n';
  }
}

}  // namespace dnstrip
