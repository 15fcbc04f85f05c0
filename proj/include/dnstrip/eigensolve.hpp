#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "dnstrip/assembly.hpp"

namespace dnstrip {

struct EigResult {
  std::vector<double> eigenvalues;  // ascending
  Eigen::MatrixXd eigenvectors;     // columns, B-orthonormal
  std::vector<double> residuals;    // ||A v - lambda B v|| / ||B v||
  int iterations = 0;
  bool converged = false;
  double shift = 0.0;
};

struct EigOptions {
  int max_basis = 0;        // 0: chosen from k
  int max_restarts = 30;
  int dense_threshold = 200;  // problems up to this size are solved densely
};

/// Shift-invert Lanczos in the B inner product with full
/// reorthogonalization. `shift` must lie strictly below the lowest eigenvalue
/// (checked through the inertia of A - shift B). Pairs are accepted when
/// residual <= tol * max(1, |lambda|).
EigResult lowest_eigenpairs(const FormPair& pair, int k, double tol, double shift, const EigOptions& opt = {});
EigResult lowest_eigenpairs(const SparseMatrix& A, const SparseMatrix& B, int k, double tol, double shift,
                            const EigOptions& opt = {});

/// As lowest_eigenpairs, but first moves the shift close below the lowest
/// eigenvalue (keeping zero inertia) so clustered spectra converge quickly,
/// and certifies through the inertia count that no eigenvalue was skipped.
EigResult lowest_eigenpairs_refined(const FormPair& pair, int k, double tol, double shift_guess,
                                    const EigOptions& opt = {});
EigResult lowest_eigenpairs_refined(const SparseMatrix& A, const SparseMatrix& B, int k, double tol,
                                    double shift_guess, const EigOptions& opt = {});

/// Number of eigenvalues of (A, B) strictly below x, from the LDL^T inertia.
int eigenvalue_count_below(const SparseMatrix& A, const SparseMatrix& B, double x);

/// Dense generalized solve, all eigenpairs (tests and small problems).
EigResult dense_eigenpairs(const SparseMatrix& A, const SparseMatrix& B);

/// Action of a B-self-adjoint bounded operator on a vector.
using LinearMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// x -> (A - sigma B)^{-1} B x, after checking that A - sigma B is positive
/// definite. Throws HypothesisViolation otherwise.
LinearMap shifted_resolvent(const SparseMatrix& A, const SparseMatrix& B, double sigma, const char* name);

/// B-norm of the difference of two B-self-adjoint maps, by power iteration on
/// the square. Relative tolerance `tol` on the estimate.
double operator_gap_norm(const LinearMap& X, const LinearMap& Y, const SparseMatrix& B, double tol,
                         int max_iterations = 500);

/// ||(A_L - sigma B)^{-1} B - (A_N - sigma B)^{-1} B||_B with
/// sigma = (pi / 2 eps)^2 - shift_kappa / eps, eps taken from pair_L.
double resolvent_gap_norm(const FormPair& pair_L, const FormPair& pair_N, double shift_kappa, double tol);

/// Same with an explicit sigma on raw matrices sharing the mass B.
double resolvent_gap_norm(const SparseMatrix& A_L, const SparseMatrix& A_N, const SparseMatrix& B, double sigma,
                          double tol);

/// Dense oracle for the same norm.
double resolvent_gap_norm_dense(const SparseMatrix& A_L, const SparseMatrix& A_N, const SparseMatrix& B,
                                double sigma);

}  // namespace dnstrip
