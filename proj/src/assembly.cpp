#include "dnstrip/assembly.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <thread>

#include "dnstrip/errors.hpp"

namespace dnstrip {

std::string to_string(FormTag tag) {
  switch (tag) {
    case FormTag::b_eps:
      return "b_eps";
    case FormTag::d_eps:
      return "d_eps";
    case FormTag::y_eps:
      return "y_eps";
    case FormTag::effective_1d:
      return "effective_1d";
    case FormTag::decoupled:
      return "decoupled";
    case FormTag::hardy_mass:
      return "hardy_mass";
  }
  return "b_eps";
}

namespace {

using Triplet = Eigen::Triplet<double>;

// Coefficients of  P u_s v_s + Q u_t v_t + R u v + S (u v_s + v u_s)/2  and mass weight W.
struct PointCoefficients {
  double P = 0.0;
  double Q = 0.0;
  double R = 0.0;
  double S = 0.0;
  double W = 0.0;
};

using CellKernel = std::function<PointCoefficients(double s, double t)>;
using EdgeKernel = std::function<double(double s)>;

const double kGauss[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};

unsigned worker_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return std::max(1u, std::min(hw == 0 ? 1u : hw, 8u));
}

// Runs body(i) for i in [0, n) on a small pool. Work is partitioned by index,
// so results written per index do not depend on the thread count.
void parallel_for(int n, const std::function<void(int)>& body) {
  const unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(std::max(n, 1)));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

std::vector<int> make_dof_map(const GridSpec& g) {
  std::vector<int> map(static_cast<std::size_t>(g.n_s) * g.n_t, -1);
  for (int i = 1; i + 1 < g.n_s; ++i) {
    for (int j = 1; j < g.n_t; ++j) map[static_cast<std::size_t>(i) * g.n_t + j] = g.dof(i, j);
  }
  return map;
}

FormPair assemble_generic(const GridSpec& grid, const CellKernel& cell, const EdgeKernel& edge, FormTag tag,
                          double epsilon) {
  grid.check();
  const int ns = grid.n_s;
  const int nt = grid.n_t;
  const double hs = grid.h_s();
  const double ht = grid.h_t();
  const int n = grid.unknowns();

  // One triplet buffer per column of cells, concatenated in column order.
  std::vector<std::vector<Triplet>> ka(ns - 1);
  std::vector<std::vector<Triplet>> ma(ns - 1);

  parallel_for(ns - 1, [&](int ci) {
    auto& kt = ka[ci];
    auto& mt = ma[ci];
    kt.reserve(static_cast<std::size_t>(16) * (nt - 1));
    mt.reserve(static_cast<std::size_t>(16) * (nt - 1));
    for (int cj = 0; cj < nt - 1; ++cj) {
      double ke[4][4] = {};
      double me[4][4] = {};
      const double s0 = grid.s_at(ci);
      const double t0 = grid.t_at(cj);
      for (double xi : kGauss) {
        for (double eta : kGauss) {
          const double s = s0 + xi * hs;
          const double t = t0 + eta * ht;
          const PointCoefficients c = cell(s, t);
          const double wq = 0.25 * hs * ht;
          double phi[4];
          double dphis[4];
          double dphit[4];
          for (int a = 0; a < 4; ++a) {
            const int as = a & 1;
            const int at = a >> 1;
            const double ls = as ? xi : 1.0 - xi;
            const double lt = at ? eta : 1.0 - eta;
            phi[a] = ls * lt;
            dphis[a] = (as ? 1.0 : -1.0) / hs * lt;
            dphit[a] = ls * (at ? 1.0 : -1.0) / ht;
          }
          for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
              ke[a][b] += wq * (c.P * dphis[a] * dphis[b] + c.Q * dphit[a] * dphit[b] + c.R * phi[a] * phi[b] +
                                0.5 * c.S * (phi[a] * dphis[b] + phi[b] * dphis[a]));
              me[a][b] += wq * c.W * phi[a] * phi[b];
            }
          }
        }
      }
      if (edge && cj == nt - 2) {
        // Top edge t = 1: local nodes 2 and 3.
        for (double xi : kGauss) {
          const double bv = edge(s0 + xi * hs) * 0.5 * hs;
          const double p[2] = {1.0 - xi, xi};
          for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) ke[2 + a][2 + b] += bv * p[a] * p[b];
          }
        }
      }
      int dofs[4];
      for (int a = 0; a < 4; ++a) {
        const int i = ci + (a & 1);
        const int j = cj + (a >> 1);
        dofs[a] = (i == 0 || i == ns - 1 || j == 0) ? -1 : grid.dof(i, j);
      }
      for (int a = 0; a < 4; ++a) {
        if (dofs[a] < 0) continue;
        for (int b = 0; b < 4; ++b) {
          if (dofs[b] < 0) continue;
          kt.emplace_back(dofs[a], dofs[b], ke[a][b]);
          mt.emplace_back(dofs[a], dofs[b], me[a][b]);
        }
      }
    }
  });

  auto merge = [n](std::vector<std::vector<Triplet>>& parts) {
    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    std::vector<Triplet> all;
    all.reserve(total);
    for (auto& p : parts) {
      all.insert(all.end(), p.begin(), p.end());
      std::vector<Triplet>().swap(p);
    }
    SparseMatrix M(n, n);
    M.setFromTriplets(all.begin(), all.end());
    M.makeCompressed();
    return M;
  };

  FormPair out;
  out.stiffness = merge(ka);
  out.mass = merge(ma);
  // Element matrices are symmetric but the two halves are summed in different
  // orders; copy the upper triangle so A = A^T holds bit for bit.
  auto symmetrize = [](SparseMatrix& M) {
    SparseMatrix U = M.triangularView<Eigen::Upper>();
    SparseMatrix full = U.selfadjointView<Eigen::Upper>();
    full.makeCompressed();
    M = std::move(full);
  };
  symmetrize(out.stiffness);
  symmetrize(out.mass);
  out.dof_map = make_dof_map(grid);
  out.tag = tag;
  out.epsilon = epsilon;
  out.grid = grid;
  return out;
}

void check_profile(const StripProfile& profile, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InvalidInput("assembly: epsilon must be positive");
  if (epsilon * profile.bounds().sup_kappa >= 1.0) {
    throw HypothesisViolation("assembly: eps * sup|kappa_g| >= 1, metric degenerates");
  }
}

MetricJet jet_f(const StripProfile& p, double eps, double s, double t) { return metric_f_jet(p, eps, s, t); }
MetricJet jet_h(const StripProfile& p, double eps, double s, double t) { return metric_h_scaled_jet(p, eps, s, t); }

}  // namespace

double potential_V(const StripProfile& profile, double epsilon, double s, double t) {
  const MetricJet f = jet_f(profile, epsilon, s, t);
  const double g = f.value;
  return 0.25 * f.ds * f.ds / (g * g * g * g) +
         (-0.25 * f.dt * f.dt / (g * g) + 0.5 * f.dtt / g) / (epsilon * epsilon);
}

double boundary_v(const StripProfile& profile, double epsilon, double s) {
  const double k = profile.kappa_g(s);
  const double tau = profile.tau(s);
  const double a = 1.0 - epsilon * k;
  return (k - epsilon * k * k - epsilon * tau * tau) / (2.0 * epsilon * (a * a + epsilon * epsilon * tau * tau));
}

double potential_W(const StripProfile& profile, double epsilon, double s, double t) {
  const MetricJet h = jet_h(profile, epsilon, s, t);
  const double g = h.value;
  return 0.25 * h.ds * h.ds / (g * g * g * g) + (-0.25 * h.dt * h.dt / (g * g) + 0.5 * h.dtt / g) / epsilon;
}

double boundary_w(const StripProfile& profile, double epsilon, double s) {
  const double k = profile.kappa_g(s);
  const double tau = profile.tau(s);
  const double a = 1.0 - epsilon * k;
  return 0.5 * (k - epsilon * k * k - tau * tau) / (a * a + epsilon * tau * tau);
}

FormPair assemble_b(const StripProfile& profile, double epsilon, const GridSpec& grid) {
  check_profile(profile, epsilon);
  const double inv_e2 = 1.0 / (epsilon * epsilon);
  CellKernel cell = [&](double s, double t) {
    const double f = metric_f(profile, epsilon, s, t);
    PointCoefficients c;
    c.P = 1.0 / f;
    c.Q = inv_e2 * f;
    c.W = f;
    return c;
  };
  return assemble_generic(grid, cell, {}, FormTag::b_eps, epsilon);
}

FormPair assemble_d(const StripProfile& profile, double epsilon, const GridSpec& grid) {
  check_profile(profile, epsilon);
  const double inv_e2 = 1.0 / (epsilon * epsilon);
  CellKernel cell = [&](double s, double t) {
    const MetricJet f = jet_f(profile, epsilon, s, t);
    const double g = f.value;
    PointCoefficients c;
    c.P = 1.0 / (g * g);
    c.Q = inv_e2;
    c.R = 0.25 * f.ds * f.ds / (g * g * g * g) + (-0.25 * f.dt * f.dt / (g * g) + 0.5 * f.dtt / g) * inv_e2;
    c.S = -f.ds / (g * g * g);
    c.W = 1.0;
    return c;
  };
  EdgeKernel edge = [&](double s) { return boundary_v(profile, epsilon, s); };
  return assemble_generic(grid, cell, edge, FormTag::d_eps, epsilon);
}

FormPair assemble_y_scaled(const StripProfile& profile, double epsilon, const GridSpec& grid) {
  check_profile(profile, epsilon);
  const double inv_e = 1.0 / epsilon;
  CellKernel cell = [&](double s, double t) {
    const MetricJet h = jet_h(profile, epsilon, s, t);
    const double g = h.value;
    PointCoefficients c;
    c.P = 1.0 / (g * g);
    c.Q = inv_e;
    c.R = 0.25 * h.ds * h.ds / (g * g * g * g) + (-0.25 * h.dt * h.dt / (g * g) + 0.5 * h.dtt / g) * inv_e;
    c.S = -h.ds / (g * g * g);
    c.W = 1.0;
    return c;
  };
  EdgeKernel edge = [&](double s) { return boundary_w(profile, epsilon, s); };
  return assemble_generic(grid, cell, edge, FormTag::y_eps, epsilon);
}

FormPair assemble_effective_1d(const std::function<double(double)>& potential, double half_length, int n) {
  if (n < 16) throw InvalidInput("assemble_effective_1d: n must be at least 16");
  if (!(half_length > 0.0)) throw InvalidInput("assemble_effective_1d: half_length must be positive");
  const double h = 2.0 * half_length / (n - 1);
  const int m = n - 2;
  std::vector<Triplet> kt;
  std::vector<Triplet> mt;
  for (int k = 0; k < m; ++k) {
    const double s = -half_length + (k + 1) * h;
    kt.emplace_back(k, k, 2.0 / (h * h) + (potential ? potential(s) : 0.0));
    if (k + 1 < m) {
      kt.emplace_back(k, k + 1, -1.0 / (h * h));
      kt.emplace_back(k + 1, k, -1.0 / (h * h));
    }
    mt.emplace_back(k, k, 1.0);
  }
  FormPair out;
  out.stiffness.resize(m, m);
  out.stiffness.setFromTriplets(kt.begin(), kt.end());
  out.mass.resize(m, m);
  out.mass.setFromTriplets(mt.begin(), mt.end());
  out.tag = FormTag::effective_1d;
  out.grid = GridSpec{half_length, n, 8};
  out.dof_map.assign(n, -1);
  for (int k = 0; k < m; ++k) out.dof_map[k + 1] = k;
  return out;
}

namespace {

LinePencil line_pencil(int nodes, double h, double x0, bool dirichlet_right,
                       const std::function<double(double)>& q) {
  // Unknowns: nodes 1..nodes-2 (dirichlet_right) or 1..nodes-1.
  const int last = dirichlet_right ? nodes - 2 : nodes - 1;
  const int m = last;
  std::vector<Triplet> kt;
  std::vector<Triplet> mt;
  for (int c = 0; c < nodes - 1; ++c) {
    double ke[2][2] = {{1.0 / h, -1.0 / h}, {-1.0 / h, 1.0 / h}};
    double me[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    for (double xi : kGauss) {
      const double p[2] = {1.0 - xi, xi};
      const double qv = q ? q(x0 + (c + xi) * h) : 0.0;
      for (int a = 0; a < 2; ++a) {
        for (int b = a; b < 2; ++b) {
          me[a][b] += 0.5 * h * p[a] * p[b];
          ke[a][b] += 0.5 * h * qv * p[a] * p[b];
        }
      }
    }
    me[1][0] = me[0][1];
    ke[1][0] = ke[0][1];
    const int idx[2] = {c, c + 1};
    for (int a = 0; a < 2; ++a) {
      const int ra = idx[a];
      if (ra == 0 || ra > last) continue;
      for (int b = 0; b < 2; ++b) {
        const int rb = idx[b];
        if (rb == 0 || rb > last) continue;
        kt.emplace_back(ra - 1, rb - 1, ke[a][b]);
        mt.emplace_back(ra - 1, rb - 1, me[a][b]);
      }
    }
  }
  LinePencil out;
  out.stiffness.resize(m, m);
  out.stiffness.setFromTriplets(kt.begin(), kt.end());
  out.mass.resize(m, m);
  out.mass.setFromTriplets(mt.begin(), mt.end());
  return out;
}

}  // namespace

LinePencil line_pencil_s(const GridSpec& grid, const std::function<double(double)>& q) {
  grid.check();
  return line_pencil(grid.n_s, grid.h_s(), -grid.half_length, true, q);
}

LinePencil line_pencil_t(const GridSpec& grid) {
  grid.check();
  return line_pencil(grid.n_t, grid.h_t(), 0.0, false, {});
}

SparseMatrix kron(const SparseMatrix& outer, const SparseMatrix& inner) {
  const Eigen::Index ni = inner.rows();
  const Eigen::Index nj = inner.cols();
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(outer.nonZeros()) * inner.nonZeros());
  for (int oc = 0; oc < outer.outerSize(); ++oc) {
    for (SparseMatrix::InnerIterator a(outer, oc); a; ++a) {
      for (int ic = 0; ic < inner.outerSize(); ++ic) {
        for (SparseMatrix::InnerIterator b(inner, ic); b; ++b) {
          trip.emplace_back(static_cast<int>(a.row() * ni + b.row()), static_cast<int>(a.col() * nj + b.col()),
                            a.value() * b.value());
        }
      }
    }
  }
  SparseMatrix K(outer.rows() * ni, outer.cols() * nj);
  K.setFromTriplets(trip.begin(), trip.end());
  K.makeCompressed();
  return K;
}

FormPair assemble_decoupled(const StripProfile& profile, double epsilon, const GridSpec& grid) {
  check_profile(profile, epsilon);
  const LinePencil ps = line_pencil_s(grid, [&](double s) { return profile.kappa_g(s) / epsilon; });
  const LinePencil pt = line_pencil_t(grid);
  FormPair out;
  out.stiffness = kron(ps.stiffness, pt.mass) + kron(ps.mass, pt.stiffness) / (epsilon * epsilon);
  out.mass = kron(ps.mass, pt.mass);
  out.stiffness.makeCompressed();
  out.mass.makeCompressed();
  out.dof_map = make_dof_map(grid);
  out.tag = FormTag::decoupled;
  out.epsilon = epsilon;
  out.grid = grid;
  return out;
}

SparseMatrix assemble_hardy_mass(const GridSpec& grid, double weight_center, const StripProfile* metric_profile,
                                 double epsilon) {
  if (metric_profile) check_profile(*metric_profile, epsilon);
  CellKernel cell = [&](double s, double t) {
    const double u = s - weight_center;
    PointCoefficients c;
    c.W = 1.0 / (1.0 + u * u);
    if (metric_profile) c.W *= metric_f(*metric_profile, epsilon, s, t);
    return c;
  };
  FormPair p = assemble_generic(grid, cell, {}, FormTag::hardy_mass, epsilon);
  return std::move(p.mass);
}

double asymmetry(const SparseMatrix& A) {
  const SparseMatrix At = A.transpose();
  const SparseMatrix D = A - At;
  double m = 0.0;
  for (int k = 0; k < D.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(D, k); it; ++it) m = std::max(m, std::abs(it.value()));
  }
  return m;
}

void write_matrix_market(std::ostream& out, const SparseMatrix& A) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
  out << std::setprecision(17);
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
    }
  }
}

}  // namespace dnstrip
