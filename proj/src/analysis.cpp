#include "dnstrip/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "dnstrip/eigensolve.hpp"
#include "dnstrip/errors.hpp"
#include "dnstrip/transverse.hpp"

namespace dnstrip {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

constexpr std::array<double, 8> kGlx = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                        -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                        0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlw = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                        0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                        0.2223810344533745, 0.1012285362903763};

// Composite Gauss-Legendre nodes and weights on [a, b].
void gauss_nodes(double a, double b, int panels, std::vector<double>& x, std::vector<double>& w) {
  x.clear();
  w.clear();
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (std::size_t q = 0; q < kGlx.size(); ++q) {
      x.push_back(mid + 0.5 * h * kGlx[q]);
      w.push_back(0.5 * h * kGlw[q]);
    }
  }
}

double inf_kappa(const StripProfile& p, const GridSpec& g) {
  double m = std::numeric_limits<double>::infinity();
  const int samples = std::max(g.n_s, 4001);
  for (int i = 0; i < samples; ++i) {
    m = std::min(m, p.kappa_g(-g.half_length + 2.0 * g.half_length * i / (samples - 1)));
  }
  return m;
}

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(6);
  o << v;
  return o.str();
}

std::vector<double> sorted_descending(std::vector<double> eps) {
  for (double e : eps) {
    if (!(e > 0.0) || !std::isfinite(e)) throw InvalidInput("sweep: every epsilon must be positive");
  }
  std::sort(eps.begin(), eps.end(), std::greater<>());
  if (std::adjacent_find(eps.begin(), eps.end()) != eps.end()) throw InvalidInput("sweep: duplicate epsilon");
  return eps;
}

}  // namespace

GridSpec GridPolicy::grid_for(double epsilon, double L) const {
  if (!(epsilon > 0.0)) throw InvalidInput("grid policy: epsilon must be positive");
  if (!(L > 0.0) || !(h_s > 0.0)) throw InvalidInput("grid policy: L and h_s must be positive");
  GridSpec g;
  g.half_length = L;
  g.n_s = std::max(8, static_cast<int>(std::lround(2.0 * L / h_s)) + 1);
  g.n_t = std::clamp(static_cast<int>(std::ceil(nt_scale / epsilon - 1e-9)), nt_min, nt_max);
  g.n_t = std::max(g.n_t, 8);
  return g;
}

double dn_threshold(double epsilon) { return std::pow(kPi / (2.0 * epsilon), 2); }

double discrete_threshold(const GridSpec& grid, double epsilon) {
  const LinePencil pt = line_pencil_t(grid);
  const EigResult r = dense_eigenpairs(pt.stiffness, pt.mass);
  return r.eigenvalues.front() / (epsilon * epsilon);
}

std::vector<double> effective_eigenvalues(const std::function<double(double)>& V, double half_length, int n, int j) {
  if (n < 16) throw InvalidInput("effective_eigenvalues: n must be at least 16");
  const double h = 2.0 * half_length / (n - 1);
  Tridiagonal T;
  T.diag.resize(n - 2);
  T.off.assign(n - 3, -1.0 / (h * h));
  for (int k = 0; k < n - 2; ++k) T.diag[k] = 2.0 / (h * h) + (V ? V(-half_length + (k + 1) * h) : 0.0);
  return tridiagonal_lowest(T, j);
}

// ---------------------------------------------------------------------------
// Discrete spectrum detection

SpectrumDetection detect_discrete_spectrum(const StripProfile& profile, double epsilon,
                                           const std::vector<GridSpec>& settings, double tol) {
  if (settings.empty()) throw InvalidInput("detect_discrete_spectrum: no grid settings");
  SpectrumDetection out;
  out.threshold = dn_threshold(epsilon);
  out.margin = -std::numeric_limits<double>::infinity();
  bool all_below = true;
  for (const GridSpec& g : settings) {
    DetectionSetting ds;
    ds.grid = g;
    try {
      const FormPair F = assemble_b(profile, epsilon, g);
      const EigResult r = lowest_eigenpairs_refined(F, 1, tol, out.threshold - 1.0 - 0.5 * out.threshold * 0.01);
      ds.lambda1 = r.eigenvalues.front();
      ds.residual = r.residuals.front();
      ds.converged = r.converged;
    } catch (const SolverFailure&) {
      ds.converged = false;
      ds.lambda1 = kNaN;
    }
    if (!ds.converged) {
      out.inconclusive = true;
      all_below = false;
    } else {
      // Residual-based bound on the distance to the discrete eigenvalue.
      const double bound = 10.0 * tol * std::max(1.0, std::abs(ds.lambda1));
      if (!(ds.lambda1 < out.threshold - bound)) all_below = false;
      out.margin = std::max(out.margin, ds.lambda1 - out.threshold);
    }
    out.settings.push_back(ds);
  }
  out.lambda1 = out.settings.front().lambda1;
  out.certified = all_below && !out.inconclusive;
  if (out.inconclusive && !std::isfinite(out.margin)) out.margin = kNaN;
  return out;
}

SpectrumDetection detect_discrete_spectrum(const StripProfile& profile, double epsilon, const GridPolicy& policy) {
  const ValidationReport v = validate(profile, epsilon, policy.half_length);
  if (!v.asymptotically_flat) {
    throw HypothesisViolation("detect_discrete_spectrum: profile is not asymptotically flat");
  }
  GridSpec a = policy.grid_for(epsilon);
  GridSpec b = policy.grid_for(epsilon, 2.0 * policy.half_length);
  b.n_t = static_cast<int>(std::ceil(a.n_t * 4.0 / 3.0));
  return detect_discrete_spectrum(profile, epsilon, {a, b}, policy.tol);
}

// ---------------------------------------------------------------------------
// Trial-function certificate

double plateau(double u) {
  const double a = std::abs(u);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  const double x = a - 1.0;
  return 1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
}

double plateau_prime(double u) {
  const double a = std::abs(u);
  if (a <= 1.0 || a >= 2.0) return 0.0;
  const double x = a - 1.0;
  const double d = -30.0 * x * x * (1.0 - x) * (1.0 - x);
  return u > 0.0 ? d : -d;
}

TrialCertificate trial_function_certificate(const StripProfile& profile, double epsilon, double n_cutoff) {
  if (!profile.is_unbent()) {
    throw HypothesisViolation("trial_function_certificate: requires kappa_g == 0 (purely twisted strip)");
  }
  if (!(epsilon > 0.0)) throw InvalidInput("trial_function_certificate: epsilon must be positive");
  if (!(n_cutoff > 0.0)) throw InvalidInput("trial_function_certificate: cutoff must be positive");
  const double n = n_cutoff;
  const double thr = dn_threshold(epsilon);
  const double inv_e2 = 1.0 / (epsilon * epsilon);

  std::vector<double> tx;
  std::vector<double> tw;
  gauss_nodes(0.0, 1.0, 8, tx, tw);
  std::vector<double> chi(tx.size());
  std::vector<double> dchi(tx.size());
  for (std::size_t q = 0; q < tx.size(); ++q) {
    chi[q] = std::sqrt(2.0) * std::sin(kPi * tx[q] / 2.0);
    dchi[q] = std::sqrt(2.0) * (kPi / 2.0) * std::cos(kPi * tx[q] / 2.0);
  }

  TrialCertificate c;
  c.n = n;
  auto accumulate = [&](double a, double b, int panels) {
    std::vector<double> sx;
    std::vector<double> sw;
    gauss_nodes(a, b, panels, sx, sw);
    for (std::size_t i = 0; i < sx.size(); ++i) {
      const double s = sx[i];
      const double phi = plateau(s / n);
      const double dphi = plateau_prime(s / n) / n;
      const double tau = profile.tau(s);
      for (std::size_t q = 0; q < tx.size(); ++q) {
        const double t = tx[q];
        const double f = metric_f(profile, epsilon, s, t);
        const double w = sw[i] * tw[q];
        c.gap += w * (dphi * dphi * chi[q] * chi[q] / f +
                      phi * phi * (inv_e2 * dchi[q] * dchi[q] * f - thr * chi[q] * chi[q] * f));
        c.kinetic += w * dphi * dphi * chi[q] * chi[q] / f;
        c.twist += w * phi * phi * tau * tau / f * t * chi[q] * dchi[q];
      }
    }
  };
  const int inner = std::max(64, static_cast<int>(std::ceil(16.0 * n)));
  const int outer = std::max(32, static_cast<int>(std::ceil(8.0 * n)));
  accumulate(-2.0 * n, -n, outer);
  accumulate(-n, n, inner);
  accumulate(n, 2.0 * n, outer);

  // Limit integral over the line: the region carrying the twist, or a wide window.
  double lo = profile.extent_lo();
  double hi = profile.extent_hi();
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    lo = -1e4;
    hi = 1e4;
  }
  if (hi > lo) {
    std::vector<double> sx;
    std::vector<double> sw;
    gauss_nodes(lo, hi, std::max(64, static_cast<int>(std::ceil(16.0 * (hi - lo) / std::max(1.0, (hi - lo) / 1000.0)))),
                sx, sw);
    for (std::size_t i = 0; i < sx.size(); ++i) {
      const double tau = profile.tau(sx[i]);
      if (tau == 0.0) continue;
      for (std::size_t q = 0; q < tx.size(); ++q) {
        const double f = metric_f(profile, epsilon, sx[i], tx[q]);
        c.limit -= sw[i] * tw[q] * tau * tau / f * tx[q] * chi[q] * dchi[q];
      }
    }
  }
  return c;
}

int first_negative_cutoff(const StripProfile& profile, double epsilon, int n_max) {
  for (int n = 1; n <= n_max; ++n) {
    if (trial_function_certificate(profile, epsilon, n).gap < 0.0) return n;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Hardy constant

double hardy_constant_at(const StripProfile& profile, double epsilon, const GridSpec& grid, double tol) {
  const FormPair F = assemble_b(profile, epsilon, grid);
  const double th = discrete_threshold(grid, epsilon);
  SparseMatrix A = F.stiffness - th * F.mass;
  A.makeCompressed();
  const SparseMatrix Br = assemble_hardy_mass(grid, 0.0, &profile, epsilon);
  const EigResult r = lowest_eigenpairs_refined(A, Br, 1, tol, -1e-3);
  if (!r.converged) throw SolverFailure("hardy_constant: eigensolver did not converge");
  return r.eigenvalues.front();
}

HardyResult hardy_constant(const StripProfile& profile, double epsilon, const GridSpec& grid, double tol) {
  HardyResult h;
  h.hypothesis = validate(profile, epsilon, grid.half_length).bent_hardy_hypothesis;
  h.threshold = discrete_threshold(grid, epsilon);
  h.constant = hardy_constant_at(profile, epsilon, grid, tol);
  GridSpec g2 = grid;
  g2.half_length = 2.0 * grid.half_length;
  g2.n_s = 2 * (grid.n_s - 1) + 1;
  h.constant_doubled = hardy_constant_at(profile, epsilon, g2, tol);
  h.relative_change = std::abs(h.constant_doubled - h.constant) / std::abs(h.constant);
  h.stable = h.constant > 0.0 && h.relative_change < 0.1;
  return h;
}

// ---------------------------------------------------------------------------
// Fits and sweeps

Fit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInput("loglog_fit: need at least two points");
  const std::size_t m = x.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::vector<double> lx(m), ly(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(x[i] > 0.0) || !(std::abs(y[i]) > 0.0)) throw InvalidInput("loglog_fit: values must be nonzero");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(std::abs(y[i]));
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  Fit f;
  const double den = m * sxx - sx * sx;
  f.exponent = (m * sxy - sx * sy) / den;
  f.intercept = (sy - f.exponent * sx) / m;
  double rss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = ly[i] - (f.exponent * lx[i] + f.intercept);
    rss += r * r;
  }
  f.residual = std::sqrt(rss / m);
  return f;
}

double SweepReport::value(std::size_t row, const std::string& column) const {
  const auto it = std::find(columns.begin(), columns.end(), column);
  if (it == columns.end()) throw InvalidInput("sweep report has no column '" + column + "'");
  return records.at(row).at(static_cast<std::size_t>(it - columns.begin()));
}

namespace {

double band_ratio(const std::vector<double>& v) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  bool same_sign = true;
  for (double x : v) {
    lo = std::min(lo, std::abs(x));
    hi = std::max(hi, std::abs(x));
    if (x * v.front() <= 0.0) same_sign = false;
  }
  if (!same_sign || lo == 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace

SweepReport thin_strip_sweep(const StripProfile& profile, const std::vector<double>& epsilons, int j_max,
                             const GridPolicy& policy) {
  const auto eps = sorted_descending(epsilons);
  if (eps.empty()) throw InvalidInput("thin_strip_sweep: empty epsilon list");
  const int J = std::clamp(j_max, 1, 4);
  SweepReport rep;
  const bool bent = !profile.is_unbent();
  const bool twisted = !profile.is_untwisted();
  rep.theorem = bent ? "T5" : (twisted ? "T6" : "T1");

  rep.columns = {"eps", "n_s", "n_t", "threshold", "threshold_discrete"};
  for (int j = 1; j <= J; ++j) rep.columns.push_back("lambda_" + std::to_string(j));
  for (int j = 1; j <= J; ++j) rep.columns.push_back("lambda_eff_" + std::to_string(j));
  rep.columns.push_back("remainder");
  rep.columns.push_back("scaled");

  for (double e : eps) {
    const ValidationReport v = validate(profile, e, policy.half_length);
    if (!v.admissible) throw HypothesisViolation("thin_strip_sweep: profile not admissible at eps = " + fmt(e));
  }

  const GridSpec g0 = policy.grid_for(eps.front());
  const double kinf = inf_kappa(profile, g0);

  for (double e : eps) {
    const GridSpec g = policy.grid_for(e);
    std::function<double(double)> V;
    if (bent) {
      V = [&profile, e](double s) { return profile.kappa_g(s) / e; };
    } else if (twisted) {
      V = [&profile](double s) {
        const double t = profile.tau(s);
        return -0.5 * t * t;
      };
    } else {
      V = [](double) { return 0.0; };
    }
    const double thr = dn_threshold(e);
    const double thr_h = discrete_threshold(g, e);
    std::vector<double> eff;
    if (policy.discrete_threshold) {
      const LinePencil ls = line_pencil_s(g, V);
      eff = lowest_eigenpairs_refined(ls.stiffness, ls.mass, J, 1e-11, std::min(0.0, kinf / e) - 1.0).eigenvalues;
    } else {
      eff = effective_eigenvalues(V, g.half_length, 4 * (g.n_s - 1) + 1, J);
    }
    std::vector<double> lam(J, kNaN);
    try {
      const FormPair F = assemble_b(profile, e, g);
      const double guess = thr + eff.front() - 1.0 - 0.1 * std::abs(eff.front());
      const EigResult r = lowest_eigenpairs_refined(F, J, policy.tol, guess);
      if (!r.converged) rep.notes.push_back("eigensolver not converged at eps = " + fmt(e));
      for (int j = 0; j < J && j < static_cast<int>(r.eigenvalues.size()); ++j) lam[j] = r.eigenvalues[j];
    } catch (const SolverFailure& ex) {
      rep.notes.push_back("solve failed at eps = " + fmt(e) + ": " + ex.what());
    }
    const double used = policy.discrete_threshold ? thr_h : thr;
    std::vector<double> row = {e, static_cast<double>(g.n_s), static_cast<double>(g.n_t), thr, thr_h};
    row.insert(row.end(), lam.begin(), lam.end());
    row.insert(row.end(), eff.begin(), eff.end());
    row.push_back(lam[0] - used - eff[0]);
    row.push_back(e * (lam[0] - thr));
    rep.records.push_back(std::move(row));
  }

  std::vector<double> ex;
  std::vector<double> rem;
  std::vector<double> scaled;
  bool finite = true;
  for (std::size_t i = 0; i < rep.records.size(); ++i) {
    ex.push_back(rep.value(i, "eps"));
    rem.push_back(rep.value(i, "remainder"));
    scaled.push_back(rep.value(i, "scaled"));
    if (!std::isfinite(rem.back())) finite = false;
  }
  std::ostringstream crit;
  if (!finite) {
    rep.verdict = false;
    crit << "incomplete sweep";
  } else if (rep.theorem == "T5") {
    std::vector<double> dist;
    for (double s : scaled) dist.push_back(std::abs(s - kinf));
    bool monotone = true;
    for (std::size_t i = 1; i < dist.size(); ++i) monotone = monotone && dist[i] <= dist[i - 1];
    const double rel = dist.back() / std::abs(kinf);
    const double band = band_ratio(rem);
    if (ex.size() >= 2) {
      std::vector<double> d2;
      for (double d : dist) d2.push_back(std::max(d, 1e-300));
      rep.fit = loglog_fit(ex, d2);
      rep.has_fit = true;
    }
    rep.verdict = rel <= 0.15 && monotone && band < 3.0;
    crit << "eps(l1-thr) -> inf kappa_g = " << fmt(kinf) << ": rel. distance " << fmt(rel) << " <= 0.15, monotone "
         << (monotone ? "yes" : "no") << ", remainder band " << fmt(band) << " < 3";
  } else if (rep.theorem == "T6") {
    if (ex.size() >= 2) {
      rep.fit = loglog_fit(ex, rem);
      rep.has_fit = true;
    }
    rep.verdict = rep.has_fit && std::abs(rep.fit.exponent - 1.0) <= 0.25 && rep.fit.residual < 0.1;
    crit << "remainder slope " << fmt(rep.fit.exponent) << " in [0.75, 1.25], fit residual " << fmt(rep.fit.residual)
         << " < 0.1";
  } else {
    bool above = true;
    for (std::size_t i = 0; i < rep.records.size(); ++i) {
      const double l1 = rep.value(i, "lambda_1");
      above = above && l1 >= rep.value(i, "threshold") - 10.0 * policy.tol * std::abs(l1);
    }
    rep.verdict = above;
    crit << "no eigenvalue below the threshold";
  }
  if (bent && !twisted && kinf >= 0.0) {
    // kappa_g >= 0: no record may fall below the threshold.
    for (std::size_t i = 0; i < rep.records.size(); ++i) {
      const double l1 = rep.value(i, "lambda_1");
      if (l1 < rep.value(i, "threshold") - 10.0 * policy.tol * std::abs(l1)) {
        rep.verdict = false;
        rep.notes.push_back("record below threshold for a kappa_g >= 0 profile at eps = " + fmt(ex[i]));
      }
    }
  }
  rep.criterion = crit.str();
  return rep;
}

SweepReport scaled_strip_sweep(const StripProfile& profile, const std::vector<double>& epsilons, int j_max,
                               const GridPolicy& policy) {
  const auto eps = sorted_descending(epsilons);
  if (eps.empty()) throw InvalidInput("scaled_strip_sweep: empty epsilon list");
  const int J = std::clamp(j_max, 1, 4);
  SweepReport rep;
  rep.theorem = "T8";
  rep.columns = {"eps", "n_s", "n_t", "threshold_scaled"};
  for (int j = 1; j <= J; ++j) rep.columns.push_back("scaled_" + std::to_string(j));
  for (int j = 1; j <= J; ++j) rep.columns.push_back("lambda_eff_" + std::to_string(j));
  rep.columns.push_back("relative_difference");
  rep.columns.push_back("remainder");

  for (double e : eps) {
    const ValidationReport v = validate(profile, e, policy.half_length);
    if (!v.admissible) throw HypothesisViolation("scaled_strip_sweep: profile not admissible at eps = " + fmt(e));
  }
  auto V = [&profile](double s) {
    const double t = profile.tau(s);
    return profile.kappa_g(s) - 0.5 * t * t;
  };
  const double L = policy.half_length;
  const std::vector<double> eff = effective_eigenvalues(V, L, 8001, J);

  for (double e : eps) {
    const GridSpec g = policy.grid_for(e);
    const double thr = policy.discrete_threshold ? discrete_threshold(g, e) * e : kPi * kPi / (4.0 * e);
    std::vector<double> sc(J, kNaN);
    try {
      const FormPair Y = assemble_y_scaled(profile, e, g);
      const EigResult r = lowest_eigenpairs_refined(Y, J, policy.tol, thr + eff.front() - 1.0);
      if (!r.converged) rep.notes.push_back("eigensolver not converged at eps = " + fmt(e));
      for (int j = 0; j < J && j < static_cast<int>(r.eigenvalues.size()); ++j) sc[j] = r.eigenvalues[j] - thr;
    } catch (const SolverFailure& ex) {
      rep.notes.push_back("solve failed at eps = " + fmt(e) + ": " + ex.what());
    }
    std::vector<double> row = {e, static_cast<double>(g.n_s), static_cast<double>(g.n_t), thr};
    row.insert(row.end(), sc.begin(), sc.end());
    row.insert(row.end(), eff.begin(), eff.end());
    row.push_back(sc[0] / eff[0] - 1.0);
    row.push_back((sc[0] - eff[0]) / e);
    rep.records.push_back(std::move(row));
  }
  std::vector<double> ex;
  std::vector<double> rem;
  for (std::size_t i = 0; i < rep.records.size(); ++i) {
    ex.push_back(rep.value(i, "eps"));
    rem.push_back(rep.value(i, "remainder"));
  }
  const double rel = std::abs(rep.records.back()[rep.columns.size() - 2]);
  const double band = band_ratio(rem);
  std::vector<double> diff;
  for (std::size_t i = 0; i < rem.size(); ++i) diff.push_back(rem[i] * ex[i]);
  if (ex.size() >= 2 && std::all_of(diff.begin(), diff.end(), [](double d) { return std::isfinite(d) && d != 0.0; })) {
    rep.fit = loglog_fit(ex, diff);
    rep.has_fit = true;
  }
  rep.verdict = std::isfinite(rel) && rel <= 0.10 && band < 3.0;
  std::ostringstream crit;
  crit << "eps(l1-thr) vs lambda_1(-d2 + kappa_g - tau^2/2) = " << fmt(eff.front()) << ": rel. difference "
       << fmt(rel) << " <= 0.10 at smallest eps, O(1) remainder band " << fmt(band) << " < 3";
  rep.criterion = crit.str();
  return rep;
}

SweepReport resolvent_sweep(const StripProfile& profile, const std::vector<double>& epsilons, double kappa,
                            const GridPolicy& policy) {
  const auto eps = sorted_descending(epsilons);
  if (profile.is_unbent()) throw HypothesisViolation("resolvent_sweep: requires kappa_g != 0");
  if (!(kappa > 0.0)) throw InvalidInput("resolvent_sweep: kappa must be positive");
  SweepReport rep;
  rep.theorem = "T7";
  rep.columns = {"eps", "n_s", "n_t", "gap_norm", "ratio"};
  const double kinf = inf_kappa(profile, policy.grid_for(eps.front()));
  if (!(kappa + kinf > 0.0)) {
    throw HypothesisViolation("resolvent_sweep: kappa + inf kappa_g = " + fmt(kappa + kinf) + " is not positive");
  }
  double prev = kNaN;
  for (double e : eps) {
    const GridSpec g = policy.grid_for(e);
    const FormPair D = assemble_d(profile, e, g);
    const FormPair H = assemble_decoupled(profile, e, g);
    const double gn = resolvent_gap_norm(D, H, kappa, 1e-6);
    rep.records.push_back({e, static_cast<double>(g.n_s), static_cast<double>(g.n_t), gn, gn / prev});
    prev = gn;
  }
  std::vector<double> ex;
  std::vector<double> gv;
  bool ratios_ok = rep.records.size() >= 4;
  double worst = 0.0;
  for (std::size_t i = 0; i < rep.records.size(); ++i) {
    ex.push_back(rep.records[i][0]);
    gv.push_back(rep.records[i][3]);
    if (i > 0) {
      const double r = rep.records[i][4];
      const bool halving = std::abs(rep.records[i - 1][0] / rep.records[i][0] - 2.0) < 1e-9;
      if (!halving) rep.notes.push_back("epsilon list is not a halving sequence at eps = " + fmt(ex[i]));
      worst = std::max(worst, r);
      ratios_ok = ratios_ok && halving && r <= std::pow(2.0, -1.4);
    }
  }
  if (ex.size() >= 2) {
    rep.fit = loglog_fit(ex, gv);
    rep.has_fit = true;
  }
  rep.verdict = ratios_ok;
  rep.criterion = "every consecutive gap ratio <= 2^-1.4 over >= 4 halvings; worst ratio " + fmt(worst);
  return rep;
}

SweepReport twisted_resolvent_sweep(const StripProfile& profile, const std::vector<double>& epsilons, double kappa,
                                    const GridPolicy& policy) {
  const auto eps = sorted_descending(epsilons);
  if (!profile.is_unbent()) throw HypothesisViolation("twisted_resolvent_sweep: requires kappa_g == 0");
  if (!(kappa > 0.0)) throw InvalidInput("twisted_resolvent_sweep: kappa must be positive");
  SweepReport rep;
  rep.theorem = "T6";
  rep.columns = {"eps", "n_s", "n_t", "gap_norm"};
  for (double e : eps) {
    const GridSpec g = policy.grid_for(e);
    const FormPair D = assemble_d(profile, e, g);
    const LinePencil pt = line_pencil_t(g);
    const EigResult tr = dense_eigenpairs(pt.stiffness, pt.mass);
    const double th = tr.eigenvalues.front() / (e * e);
    const Eigen::VectorXd chi = tr.eigenvectors.col(0);
    const Eigen::VectorXd mchi = pt.mass * chi;
    const LinePencil ps = line_pencil_s(g, [&profile, kappa](double s) {
      const double t = profile.tau(s);
      return -0.5 * t * t + kappa;
    });
    // [(D - t_h) + kappa]^{-1}: shift sigma = t_h - kappa.
    const LinearMap X = shifted_resolvent(D.stiffness, D.mass, th - kappa, "twisted_resolvent_sweep");
    const LinearMap Ns = shifted_resolvent(ps.stiffness, ps.mass, 0.0, "twisted_resolvent_sweep (1D)");
    const int nt = static_cast<int>(chi.size());
    const int ns = static_cast<int>(ps.mass.rows());
    const LinearMap Y = [&, nt, ns](const Eigen::VectorXd& v) -> Eigen::VectorXd {
      Eigen::VectorXd c(ns);
      for (int i = 0; i < ns; ++i) c[i] = mchi.dot(v.segment(static_cast<Eigen::Index>(i) * nt, nt));
      // Ns applies (K - 0 M)^{-1} M, i.e. the 1D resolvent on coefficients.
      const Eigen::VectorXd w = Ns(c);
      Eigen::VectorXd out(v.size());
      for (int i = 0; i < ns; ++i) out.segment(static_cast<Eigen::Index>(i) * nt, nt) = w[i] * chi;
      return out;
    };
    const double gn = operator_gap_norm(X, Y, D.mass, 1e-6);
    rep.records.push_back({e, static_cast<double>(g.n_s), static_cast<double>(g.n_t), gn});
  }
  std::vector<double> ex;
  std::vector<double> gv;
  for (const auto& r : rep.records) {
    ex.push_back(r[0]);
    gv.push_back(r[3]);
  }
  if (ex.size() >= 2) {
    rep.fit = loglog_fit(ex, gv);
    rep.has_fit = true;
  }
  rep.verdict = rep.has_fit && rep.fit.exponent >= 0.4;
  rep.criterion = "gap norm slope " + fmt(rep.fit.exponent) + " >= 0.4";
  return rep;
}

}  // namespace dnstrip
