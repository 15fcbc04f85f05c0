#pragma once

// Symmetric tridiagonal eigenproblems: Sturm bisection for eigenvalues,
// inverse iteration for vectors. Used by every 1D solve.

#include <vector>

namespace dnstrip {

struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;  // off[i] couples i and i+1

  int size() const { return static_cast<int>(diag.size()); }
};

/// Number of eigenvalues strictly below x.
int sturm_count(const Tridiagonal& T, double x);

/// The `count` smallest eigenvalues, ascending, to full double precision.
std::vector<double> tridiagonal_lowest(const Tridiagonal& T, int count);

/// Unit eigenvector for a (converged) eigenvalue by inverse iteration.
std::vector<double> tridiagonal_eigenvector(const Tridiagonal& T, double lambda);

/// Generalized pencil K v = lambda M v with tridiagonal K and diagonal M > 0,
/// reduced to M^{-1/2} K M^{-1/2}.
struct DiagonalPencil {
  Tridiagonal stiffness;
  std::vector<double> mass;

  Tridiagonal symmetrized() const;
  std::vector<double> lowest(int count) const;
  /// Eigenvector in the original coordinates, M-normalized.
  std::vector<double> eigenvector(double lambda) const;
};

}  // namespace dnstrip
