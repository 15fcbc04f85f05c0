#pragma once

// One-dimensional cross-sectional problems on (0, 1) with a Dirichlet end at
// t = 0 and a Neumann or Robin end at t = 1.

#include <functional>
#include <ostream>
#include <vector>

#include "dnstrip/profiles.hpp"
#include "dnstrip/tridiagonal.hpp"

namespace dnstrip {

/// ((2j-1) pi / 2)^2 for j = 1..count.
std::vector<double> dn_eigenvalues_1d(int count);

/// Unique nu in ((pi/2)^2, pi^2) with sqrt(nu) = -alpha tan(sqrt(nu)).
/// alpha = 0 gives (pi/2)^2. Throws HypothesisViolation for alpha < 0.
double solve_nu0(double alpha);

/// |mu cos mu + alpha sin mu| / (1 + alpha) at mu = sqrt(solve_nu0(alpha)).
double nu0_residual(double alpha);

/// alpha(s) = eps kappa_g(s) / (2 h_eps(s, 1)).
double robin_alpha(const StripProfile& profile, double epsilon, double s);

/// Generic weighted problem  int p |v'|^2 + int q v^2 + robin v(1)^2  over
/// int w v^2, v(0) = 0. Three-point stencil, lumped mass.
struct WeightedProblem {
  std::function<double(double)> p;  // stiffness weight, > 0
  std::function<double(double)> w;  // mass weight, > 0
  std::function<double(double)> q;  // potential density (may be empty)
  double robin = 0.0;
};

DiagonalPencil discretize(const WeightedProblem& problem, int cells);

/// Lowest eigenvalues at `cells` and 2*`cells`, combined by Richardson
/// extrapolation (4 l_fine - l_coarse) / 3.
std::vector<double> richardson_eigenvalues(const WeightedProblem& problem, int cells, int count);

/// First eigenvalue of S_eps(s): weight h_eps = 1 - eps t kappa_g(s).
double lambda0_transverse(const StripProfile& profile, double epsilon, double s, int resolution = 256);

/// First eigenvalue of the transverse form with the full weight f_eps(s, .).
double sigma_transverse(const StripProfile& profile, double epsilon, double s, int resolution = 256);

/// Perturbation coefficient beta(s, eps).
double beta_coefficient(const StripProfile& profile, double epsilon, double s);

/// r(x) = x^2 (2 - x) / (4 (1 - x)^2 (4 - 5x)) on [0, 4/5).
double r_function(double x);

/// Root of r(x) = (pi/2)^2 in (0, 4/5). Computed once and cached.
double find_x0();

struct RobinProblem {
  std::function<double(double)> potential;  // empty means V = 0
  double robin_alpha = 0.0;
};

struct RobinResult {
  double eigenvalue = 0.0;
  double boundary_value_sq = 0.0;  // psi(1)^2
  double norm_sq = 0.0;            // ||psi||^2
  double boundary_ratio() const { return boundary_value_sq / norm_sq; }
};

/// First eigenpair data of -d^2/dt^2 + V with psi(0) = 0, psi'(1) + alpha psi(1) = 0.
/// Values are Richardson-extrapolated from `resolution` and 2 * `resolution` cells.
RobinResult robin_first_eigenvalue(const RobinProblem& problem, int resolution);

/// Same quantities from a single grid with no extrapolation. The discrete
/// quantities then satisfy the variational bound exactly.
RobinResult robin_first_eigenvalue_raw(const RobinProblem& problem, int resolution);

/// lambda_j(-d^2/ds^2 + mu V) / mu on [-L, L] with Dirichlet ends, for each mu.
std::vector<double> effective_limit_check(const std::function<double(double)>& V, const std::vector<double>& mu_list,
                                          int j, double half_length, int resolution);

struct TransverseRow {
  double s = 0.0;
  double alpha = 0.0;
  double nu0 = 0.0;
  double lambda0 = 0.0;
  double beta = 0.0;
  double gap = 0.0;
};

std::vector<TransverseRow> transverse_table(const StripProfile& profile, double epsilon, const std::vector<double>& s,
                                            int resolution = 256);
void write_transverse_csv(std::ostream& out, const std::vector<TransverseRow>& rows);

}  // namespace dnstrip
