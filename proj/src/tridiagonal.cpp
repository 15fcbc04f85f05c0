#include "dnstrip/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dnstrip/errors.hpp"

namespace dnstrip {

int sturm_count(const Tridiagonal& T, double x) {
  const int n = T.size();
  const double tiny = std::numeric_limits<double>::min() * 1e10;
  int count = 0;
  double d = 1.0;
  for (int i = 0; i < n; ++i) {
    const double b2 = i > 0 ? T.off[i - 1] * T.off[i - 1] : 0.0;
    d = T.diag[i] - x - (i > 0 ? b2 / d : 0.0);
    if (d == 0.0) d = -tiny;
    if (d < 0.0) ++count;
  }
  return count;
}

namespace {

void gershgorin(const Tridiagonal& T, double& lo, double& hi) {
  const int n = T.size();
  lo = std::numeric_limits<double>::infinity();
  hi = -lo;
  for (int i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(T.off[i - 1]);
    if (i + 1 < n) r += std::abs(T.off[i]);
    lo = std::min(lo, T.diag[i] - r);
    hi = std::max(hi, T.diag[i] + r);
  }
  const double pad = 1e-12 * std::max(std::abs(lo), std::abs(hi)) + 1e-300;
  lo -= pad;
  hi += pad;
}

// Solve (T - shift) x = b by Gaussian elimination with partial pivoting.
std::vector<double> shifted_solve(const Tridiagonal& T, double shift, std::vector<double> b) {
  const int n = T.size();
  std::vector<double> d(n), u1(n, 0.0), u2(n, 0.0), l(n, 0.0);
  std::vector<double> sub(n, 0.0);  // sub-diagonal of row i (entry i, i-1)
  for (int i = 0; i < n; ++i) {
    d[i] = T.diag[i] - shift;
    if (i + 1 < n) u1[i] = T.off[i];
    if (i > 0) sub[i] = T.off[i - 1];
  }
  const double tiny = 1e-300;
  for (int i = 0; i + 1 < n; ++i) {
    if (std::abs(sub[i + 1]) > std::abs(d[i])) {
      // Swap rows i and i+1.
      std::swap(d[i], sub[i + 1]);
      std::swap(u1[i], d[i + 1]);
      std::swap(u2[i], u1[i + 1]);
      std::swap(b[i], b[i + 1]);
    }
    if (d[i] == 0.0) d[i] = tiny;
    const double m = sub[i + 1] / d[i];
    l[i] = m;
    d[i + 1] -= m * u1[i];
    u1[i + 1] -= m * u2[i];
    b[i + 1] -= m * b[i];
    sub[i + 1] = 0.0;
  }
  if (d[n - 1] == 0.0) d[n - 1] = tiny;
  std::vector<double> x(n);
  for (int i = n - 1; i >= 0; --i) {
    double v = b[i];
    if (i + 1 < n) v -= u1[i] * x[i + 1];
    if (i + 2 < n) v -= u2[i] * x[i + 2];
    x[i] = v / d[i];
  }
  return x;
}

void normalize(std::vector<double>& x) {
  double nrm = 0.0;
  for (double v : x) nrm += v * v;
  nrm = std::sqrt(nrm);
  if (!(nrm > 0.0) || !std::isfinite(nrm)) throw SolverFailure("inverse iteration produced a degenerate vector");
  for (double& v : x) v /= nrm;
}

}  // namespace

std::vector<double> tridiagonal_lowest(const Tridiagonal& T, int count) {
  const int n = T.size();
  if (n == 0) throw InvalidInput("tridiagonal_lowest: empty matrix");
  count = std::min(count, n);
  double lo0 = 0.0;
  double hi0 = 0.0;
  gershgorin(T, lo0, hi0);
  std::vector<double> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    double lo = k > 0 ? out.back() : lo0;
    double hi = hi0;
    // The k-th eigenvalue (0-based) is the smallest x with count(x) > k.
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (sturm_count(T, mid) > k) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    out.push_back(0.5 * (lo + hi));
  }
  return out;
}

std::vector<double> tridiagonal_eigenvector(const Tridiagonal& T, double lambda) {
  const int n = T.size();
  const double scale = std::max(1.0, std::abs(lambda));
  const double shift = lambda - 1e-13 * scale;
  std::vector<double> x(n);
  // Fixed, sign-definite start; the lowest modes of our operators are not orthogonal to it.
  for (int i = 0; i < n; ++i) x[i] = 1.0 + 0.25 * std::sin(0.7 * i + 0.3);
  normalize(x);
  for (int it = 0; it < 4; ++it) {
    x = shifted_solve(T, shift, x);
    normalize(x);
  }
  // Sign convention: largest component positive.
  const auto big = std::max_element(x.begin(), x.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  if (*big < 0.0) {
    for (double& v : x) v = -v;
  }
  return x;
}

Tridiagonal DiagonalPencil::symmetrized() const {
  const int n = stiffness.size();
  Tridiagonal T;
  T.diag.resize(n);
  T.off.resize(n > 0 ? n - 1 : 0);
  for (int i = 0; i < n; ++i) {
    if (!(mass[i] > 0.0)) throw InvalidInput("pencil mass must be positive");
    T.diag[i] = stiffness.diag[i] / mass[i];
    if (i + 1 < n) T.off[i] = stiffness.off[i] / std::sqrt(mass[i] * mass[i + 1]);
  }
  return T;
}

std::vector<double> DiagonalPencil::lowest(int count) const { return tridiagonal_lowest(symmetrized(), count); }

std::vector<double> DiagonalPencil::eigenvector(double lambda) const {
  std::vector<double> y = tridiagonal_eigenvector(symmetrized(), lambda);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] /= std::sqrt(mass[i]);
  return y;
}

}  // namespace dnstrip
