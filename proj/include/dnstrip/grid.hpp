#pragma once

#include <stdexcept>

#include "dnstrip/errors.hpp"

namespace dnstrip {

/// Tensor grid on [-L, L] x [0, 1]. Nodes at s = -L + i h_s, t = j h_t.
struct GridSpec {
  double half_length = 10.0;
  int n_s = 400;
  int n_t = 20;

  double h_s() const { return 2.0 * half_length / (n_s - 1); }
  double h_t() const { return 1.0 / (n_t - 1); }
  double s_at(int i) const { return -half_length + i * h_s(); }
  double t_at(int j) const { return j * h_t(); }

  // Unknowns exclude the t = 0 row and the s = +-L columns.
  int interior_s() const { return n_s - 2; }
  int free_t() const { return n_t - 1; }
  int unknowns() const { return interior_s() * free_t(); }

  // t-fastest ordering; i in 1..n_s-2, j in 1..n_t-1.
  int dof(int i, int j) const { return (i - 1) * free_t() + (j - 1); }

  void check() const {
    if (!(half_length > 0.0)) throw InvalidInput("grid: half_length must be positive");
    if (n_s < 8 || n_t < 8) throw InvalidInput("grid: n_s and n_t must be at least 8");
  }
};

}  // namespace dnstrip
