#pragma once

// Sparse matrix pairs (A, B) for the quadratic forms on the truncated strip
// [-L, L] x [0, 1]: bilinear elements, 2x2 Gauss quadrature, Dirichlet at
// t = 0 and s = +-L, natural condition at t = 1.

#include <Eigen/SparseCore>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "dnstrip/grid.hpp"
#include "dnstrip/profiles.hpp"

namespace dnstrip {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class FormTag { b_eps, d_eps, y_eps, effective_1d, decoupled, hardy_mass };

std::string to_string(FormTag tag);

struct FormPair {
  SparseMatrix stiffness;
  SparseMatrix mass;
  std::vector<int> dof_map;  // node (i * n_t + j) -> unknown index, -1 for Dirichlet nodes
  FormTag tag = FormTag::b_eps;
  double epsilon = 0.0;
  GridSpec grid;

  int size() const { return static_cast<int>(stiffness.rows()); }
};

/// b_eps: int |d_s psi|^2 / f + eps^-2 int |d_t psi|^2 f, mass weight f.
FormPair assemble_b(const StripProfile& profile, double epsilon, const GridSpec& grid);

/// d_eps = b_eps after psi -> f^{-1/2} psi: flat mass, potential V_eps,
/// symmetrized first-order term and boundary coefficient v_eps on t = 1.
FormPair assemble_d(const StripProfile& profile, double epsilon, const GridSpec& grid);

/// eps * y_eps: the dilated form with metric h~_eps, potential W_eps and
/// boundary coefficient w_eps. Flat mass.
FormPair assemble_y_scaled(const StripProfile& profile, double epsilon, const GridSpec& grid);

/// Potentials appearing in the flattened forms, exposed for checks.
double potential_V(const StripProfile& profile, double epsilon, double s, double t);
double boundary_v(const StripProfile& profile, double epsilon, double s);
double potential_W(const StripProfile& profile, double epsilon, double s, double t);
double boundary_w(const StripProfile& profile, double epsilon, double s);

/// -u'' + V u on [-L, L], Dirichlet ends, three-point stencil on n nodes
/// (n - 2 unknowns), identity mass.
FormPair assemble_effective_1d(const std::function<double(double)>& potential, double half_length, int n);

/// One-dimensional bilinear-element pencils sharing the 2D grid.
struct LinePencil {
  SparseMatrix stiffness;
  SparseMatrix mass;
};

/// s-direction: int u'v' + int q u v on the interior s nodes.
LinePencil line_pencil_s(const GridSpec& grid, const std::function<double(double)>& q);
/// t-direction: int u'v' on the free t nodes (Dirichlet at 0, natural at 1).
LinePencil line_pencil_t(const GridSpec& grid);

/// H_eps = (-d_s^2 + kappa_g / eps) (x) 1 + 1 (x) eps^-2 (-d_t^2) on the
/// tensor grid, with the same consistent mass M_s (x) M_t as assemble_d.
FormPair assemble_decoupled(const StripProfile& profile, double epsilon, const GridSpec& grid);

/// Mass matrix with weight rho(s - center) * (f_eps or 1), rho(s) = 1/(1+s^2).
SparseMatrix assemble_hardy_mass(const GridSpec& grid, double weight_center, const StripProfile* metric_profile,
                                 double epsilon);

/// Kronecker product with the first factor outermost (matches t-fastest order).
SparseMatrix kron(const SparseMatrix& outer, const SparseMatrix& inner);

/// Largest |A - A^T| entry.
double asymmetry(const SparseMatrix& A);

void write_matrix_market(std::ostream& out, const SparseMatrix& A);

}  // namespace dnstrip
