#pragma once

// Analysis drivers built on the assembly and eigensolve layers.

#include <functional>
#include <string>
#include <vector>

#include "dnstrip/assembly.hpp"
#include "dnstrip/grid.hpp"
#include "dnstrip/profiles.hpp"

namespace dnstrip {

/// Maps a strip width to a grid. n_t = clamp(ceil(nt_scale / eps), nt_min, nt_max);
/// n_s from the target spacing h_s on [-L, L].
struct GridPolicy {
  double half_length = 10.0;
  double h_s = 0.05;
  double nt_scale = 8.0;
  int nt_min = 16;
  int nt_max = 256;
  // Measure remainders against the discrete transverse ground value
  // lambda_t^h / eps^2 and a bilinear 1D effective operator on the same s grid.
  bool discrete_threshold = false;
  double tol = 1e-9;

  GridSpec grid_for(double epsilon) const { return grid_for(epsilon, half_length); }
  GridSpec grid_for(double epsilon, double L) const;
};

/// (pi / (2 eps))^2.
double dn_threshold(double epsilon);

/// Lowest eigenvalue of the bilinear t-pencil on the grid, divided by eps^2.
double discrete_threshold(const GridSpec& grid, double epsilon);

struct DetectionSetting {
  GridSpec grid;
  double lambda1 = 0.0;
  double residual = 0.0;
  bool converged = false;
};

struct SpectrumDetection {
  double lambda1 = 0.0;    // at the first setting
  double threshold = 0.0;  // (pi / 2 eps)^2
  double margin = 0.0;     // max over settings of lambda1 - threshold
  bool certified = false;
  bool inconclusive = false;
  std::vector<DetectionSetting> settings;
};

/// Computes lambda_1 of b_eps at (L, policy grid) and at (2L, refined t grid).
/// certified iff every setting converged and lambda_1 < threshold minus the
/// solver error bound. Dirichlet truncation and conforming elements make each
/// lambda_1 an upper bound, so a certificate is evidence of discrete spectrum.
SpectrumDetection detect_discrete_spectrum(const StripProfile& profile, double epsilon, const GridPolicy& policy);

/// Same, on explicitly chosen grids.
SpectrumDetection detect_discrete_spectrum(const StripProfile& profile, double epsilon,
                                           const std::vector<GridSpec>& settings, double tol = 1e-9);

/// Plateau cutoff: 1 on [-1, 1], 0 outside (-2, 2), quintic smoothstep joins.
double plateau(double u);
double plateau_prime(double u);

struct TrialCertificate {
  double n = 0.0;
  double gap = 0.0;      // b_eps(psi_n) - (pi/2eps)^2 ||psi_n||^2 by direct quadrature
  double kinetic = 0.0;  // int |phi_n' chi_1|^2 / f
  double twist = 0.0;    // int phi_n^2 tau^2 / f t chi_1 chi_1'
  double limit = 0.0;    // -int tau^2 / f t chi_1 chi_1' over the whole strip
};

/// Rayleigh-quotient gap of psi_n = phi(s / n) chi_1(t). Requires kappa_g == 0.
TrialCertificate trial_function_certificate(const StripProfile& profile, double epsilon, double n_cutoff);

/// Smallest integer n in [1, n_max] whose certificate gap is negative, or 0.
int first_negative_cutoff(const StripProfile& profile, double epsilon, int n_max);

struct HardyResult {
  double constant = 0.0;          // at L
  double constant_doubled = 0.0;  // at 2L, same spacing
  double relative_change = 0.0;
  bool stable = false;            // relative change < 10%
  bool hypothesis = false;        // kappa_g >= 0, kappa_g != 0, eps sup kappa_g <= x0
  double threshold = 0.0;         // discrete transverse ground value used as the shift
};

/// Smallest c with (A_b - t_h B_b) x = c B_rho x, t_h the discrete transverse
/// ground value, recomputed on [-2L, 2L] with the same spacing.
HardyResult hardy_constant(const StripProfile& profile, double epsilon, const GridSpec& grid, double tol = 1e-9);

/// Single evaluation (no doubling).
double hardy_constant_at(const StripProfile& profile, double epsilon, const GridSpec& grid, double tol = 1e-9);

struct Fit {
  double exponent = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS residual in log-log coordinates
};

/// Least squares fit of log|y| = p log x + c.
Fit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

struct SweepReport {
  std::string scenario;
  std::string theorem;  // T1..T8, LA1, TA2
  std::vector<std::string> columns;
  std::vector<std::vector<double>> records;  // sorted by eps descending
  Fit fit;
  bool has_fit = false;
  bool verdict = false;
  std::string criterion;
  std::vector<std::string> notes;

  double value(std::size_t row, const std::string& column) const;
};

/// Thin-strip sweep: bent (kappa_g != 0) or purely twisted (kappa_g == 0, tau != 0).
SweepReport thin_strip_sweep(const StripProfile& profile, const std::vector<double>& epsilons, int j_max,
                             const GridPolicy& policy);

/// Scaled strip: eps (lambda_j(y_eps) - threshold) against lambda_j(-d^2 + kappa_g - tau^2 / 2).
SweepReport scaled_strip_sweep(const StripProfile& profile, const std::vector<double>& epsilons, int j_max,
                               const GridPolicy& policy);

/// Gap norm between the flattened operator and the decoupled one.
SweepReport resolvent_sweep(const StripProfile& profile, const std::vector<double>& epsilons, double kappa,
                            const GridPolicy& policy);

/// Purely twisted route: gap norm between [(D - t_h) + kappa]^{-1} and
/// [(-d^2 - tau^2/2) + kappa]^{-1} (+) 0 on the span of the discrete chi_1.
SweepReport twisted_resolvent_sweep(const StripProfile& profile, const std::vector<double>& epsilons, double kappa,
                                    const GridPolicy& policy);

/// Lowest j eigenvalues of -u'' + V u on [-L, L], Dirichlet, three-point
/// stencil with n nodes, via Sturm bisection (the dense 1D oracle).
std::vector<double> effective_eigenvalues(const std::function<double(double)>& V, double half_length, int n, int j);

}  // namespace dnstrip
