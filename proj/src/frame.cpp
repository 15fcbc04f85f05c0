#include "dnstrip/frame.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "dnstrip/errors.hpp"

namespace dnstrip {

namespace {

// State layout: [Gamma, T, N_1, ..., N_n], each in R^{n+1}.
struct State {
  std::vector<Eigen::VectorXd> v;
};

State derivative(const State& y, const std::vector<double>& k) {
  const std::size_t n = k.size();
  State d;
  d.v.resize(y.v.size());
  d.v[0] = y.v[1];
  Eigen::VectorXd dt = Eigen::VectorXd::Zero(y.v[1].size());
  for (std::size_t j = 0; j < n; ++j) dt += k[j] * y.v[2 + j];
  d.v[1] = dt;
  for (std::size_t j = 0; j < n; ++j) d.v[2 + j] = -k[j] * y.v[1];
  return d;
}

State axpy(const State& y, double a, const State& d) {
  State out = y;
  for (std::size_t i = 0; i < y.v.size(); ++i) out.v[i] += a * d.v[i];
  return out;
}

std::vector<double> eval_curvatures(const std::vector<std::function<double(double)>>& c, double s) {
  std::vector<double> k(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) {
    k[j] = c[j](s);
    if (!std::isfinite(k[j])) {
      std::ostringstream msg;
      msg << "integrate_frame: curvature k_" << j + 1 << " is not finite at s=" << s;
      throw InvalidInput(msg.str());
    }
  }
  return k;
}

double defect(const std::vector<Eigen::VectorXd>& e) {
  double m = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (std::size_t j = i; j < e.size(); ++j) {
      m = std::max(m, std::abs(e[i].dot(e[j]) - (i == j ? 1.0 : 0.0)));
    }
  }
  return m;
}

FrameSample to_sample(double s, const State& y) {
  FrameSample f;
  f.s = s;
  f.position = y.v[0];
  f.tangent = y.v[1];
  f.normals.assign(y.v.begin() + 2, y.v.end());
  return f;
}

}  // namespace

InitialFrame InitialFrame::standard(int n) {
  if (n < 1) throw InvalidInput("InitialFrame: codimension must be at least 1");
  InitialFrame f;
  f.position = Eigen::VectorXd::Zero(n + 1);
  f.tangent = Eigen::VectorXd::Unit(n + 1, 0);
  for (int j = 1; j <= n; ++j) f.normals.push_back(Eigen::VectorXd::Unit(n + 1, j));
  return f;
}

double orthonormality_defect(const FrameSample& f) {
  std::vector<Eigen::VectorXd> e{f.tangent};
  e.insert(e.end(), f.normals.begin(), f.normals.end());
  return defect(e);
}

FrameTrajectory integrate_frame(const std::vector<std::function<double(double)>>& curvatures, double s_lo,
                                double s_hi, double step, const InitialFrame& initial, int reorth_every,
                                int record_every) {
  if (!(step > 0.0)) throw InvalidInput("integrate_frame: step must be positive");
  if (!(s_hi > s_lo)) throw InvalidInput("integrate_frame: empty s range");
  if (record_every < 1 || reorth_every < 1) throw InvalidInput("integrate_frame: strides must be positive");
  const std::size_t n = curvatures.size();
  if (initial.normals.size() != n) throw InvalidInput("integrate_frame: need one normal per curvature");
  const Eigen::Index dim = static_cast<Eigen::Index>(n + 1);
  std::vector<Eigen::VectorXd> basis{initial.tangent};
  basis.insert(basis.end(), initial.normals.begin(), initial.normals.end());
  for (const auto& e : basis) {
    if (e.size() != dim) throw InvalidInput("integrate_frame: frame vectors must live in R^{n+1}");
  }
  if (initial.position.size() != dim) throw InvalidInput("integrate_frame: position must live in R^{n+1}");
  if (defect(basis) > 1e-12) throw InvalidInput("integrate_frame: initial frame is not orthonormal within 1e-12");

  const long steps = std::max(1L, std::lround((s_hi - s_lo) / step));
  const double h = (s_hi - s_lo) / steps;

  State y;
  y.v.push_back(initial.position);
  y.v.insert(y.v.end(), basis.begin(), basis.end());

  FrameTrajectory out;
  out.samples.push_back(to_sample(s_lo, y));
  for (long i = 0; i < steps; ++i) {
    const double s = s_lo + i * h;
    const auto k1c = eval_curvatures(curvatures, s);
    const auto k2c = eval_curvatures(curvatures, s + 0.5 * h);
    const auto k4c = eval_curvatures(curvatures, s + h);
    const State d1 = derivative(y, k1c);
    const State d2 = derivative(axpy(y, 0.5 * h, d1), k2c);
    const State d3 = derivative(axpy(y, 0.5 * h, d2), k2c);
    const State d4 = derivative(axpy(y, h, d3), k4c);
    for (std::size_t c = 0; c < y.v.size(); ++c) y.v[c] += h / 6.0 * (d1.v[c] + 2.0 * d2.v[c] + 2.0 * d3.v[c] + d4.v[c]);

    if ((i + 1) % reorth_every == 0) {
      std::vector<Eigen::VectorXd> e(y.v.begin() + 1, y.v.end());
      out.max_drift = std::max(out.max_drift, defect(e));
      // Modified Gram-Schmidt, tangent first.
      for (std::size_t a = 0; a < e.size(); ++a) {
        for (std::size_t b = 0; b < a; ++b) e[a] -= e[a].dot(e[b]) * e[b];
        e[a].normalize();
      }
      for (std::size_t a = 0; a < e.size(); ++a) y.v[1 + a] = e[a];
      ++out.reorthonormalizations;
    }
    if ((i + 1) % record_every == 0 || i + 1 == steps) out.samples.push_back(to_sample(s_lo + (i + 1) * h, y));
  }
  {
    std::vector<Eigen::VectorXd> e(y.v.begin() + 1, y.v.end());
    out.max_drift = std::max(out.max_drift, defect(e));
  }
  return out;
}

std::vector<std::function<double(double)>> curvatures_for(const StripProfile& profile) {
  if (!profile.has_angle()) throw Unsupported("curvatures_for: profile carries no angle function");
  const AngleFunctions a = profile.angle();
  return {[profile, a](double s) { return profile.kappa_g(s) * std::cos(a.theta(s)); },
          [profile, a](double s) { return profile.kappa_g(s) * std::sin(a.theta(s)); }};
}

EmbeddingGrid embed(const StripProfile& profile, const FrameTrajectory& frame, double epsilon, const GridSpec& grid) {
  if (!profile.has_angle()) throw Unsupported("embed: profile carries no angle function theta(s)");
  if (!(epsilon > 0.0)) throw InvalidInput("embed: epsilon must be positive");
  grid.check();
  if (static_cast<int>(frame.samples.size()) != grid.n_s) {
    throw InvalidInput("embed: frame must be sampled at the grid's s nodes");
  }
  const auto& ang = profile.angle();
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(static_cast<std::size_t>(grid.n_s) * grid.n_t);
  for (int i = 0; i < grid.n_s; ++i) {
    const FrameSample& f = frame.samples[i];
    if (f.normals.size() != 2) throw Unsupported("embed: only n = 2 frames are supported");
    const double th = ang.theta(f.s);
    const Eigen::VectorXd nt = std::cos(th) * f.normals[0] + std::sin(th) * f.normals[1];
    for (int j = 0; j < grid.n_t; ++j) {
      if (j == 0) {
        pts.push_back(f.position);
      } else {
        pts.push_back(f.position + epsilon * grid.t_at(j) * nt);
      }
    }
  }
  return EmbeddingGrid(grid, std::move(pts));
}

EmbeddingGrid embed_profile(const StripProfile& profile, double epsilon, const GridSpec& grid) {
  grid.check();
  const int sub = std::max(1, static_cast<int>(std::ceil(grid.h_s() / 1e-3)));
  const FrameTrajectory tr = integrate_frame(curvatures_for(profile), -grid.half_length, grid.half_length,
                                             grid.h_s() / sub, InitialFrame::standard(2), 1000, sub);
  return embed(profile, tr, epsilon, grid);
}

Eigen::Matrix2d first_fundamental_form(const EmbeddingGrid& e, int i, int j) {
  const GridSpec& g = e.grid();
  if (i < 1 || i > g.n_s - 2 || j < 1 || j > g.n_t - 2) {
    throw InvalidInput("first_fundamental_form: node is on the boundary, stencil incomplete");
  }
  const Eigen::VectorXd ls = (e.point(i + 1, j) - e.point(i - 1, j)) / (2.0 * g.h_s());
  const Eigen::VectorXd lt = (e.point(i, j + 1) - e.point(i, j - 1)) / (2.0 * g.h_t());
  Eigen::Matrix2d G;
  G(0, 0) = ls.dot(ls);
  G(0, 1) = G(1, 0) = ls.dot(lt);
  G(1, 1) = lt.dot(lt);
  return G;
}

void write_xyz(std::ostream& out, const EmbeddingGrid& embedding) {
  out << std::setprecision(12);
  for (const auto& p : embedding.points()) {
    for (Eigen::Index c = 0; c < p.size(); ++c) out << (c ? " " : "") << p[c];
    out << '\n';
  }
}

}  // namespace dnstrip
