#pragma once

// Relatively parallel adapted frames: T' = sum k_j N_j, N_j' = -k_j T.
// Integrated with classical RK4 on a uniform grid.

#include <Eigen/Dense>
#include <functional>
#include <ostream>
#include <vector>

#include "dnstrip/grid.hpp"
#include "dnstrip/profiles.hpp"

namespace dnstrip {

struct FrameSample {
  double s = 0.0;
  Eigen::VectorXd position;  // Gamma(s) in R^{n+1}
  Eigen::VectorXd tangent;
  std::vector<Eigen::VectorXd> normals;
};

struct FrameTrajectory {
  std::vector<FrameSample> samples;
  double max_drift = 0.0;  // max |<e_i, e_j> - delta_ij| before each re-orthonormalization
  int reorthonormalizations = 0;
};

/// Initial data: position and an orthonormal set {T, N_1, ..., N_n}.
struct InitialFrame {
  Eigen::VectorXd position;
  Eigen::VectorXd tangent;
  std::vector<Eigen::VectorXd> normals;

  /// Gamma(0) = 0 and the standard basis of R^{n+1}.
  static InitialFrame standard(int n);
};

/// Integrates from s_lo to s_hi in steps of (s_hi - s_lo) / round((s_hi - s_lo) / step),
/// keeping every `record_every`-th sample. Modified Gram-Schmidt every `reorth_every` steps.
FrameTrajectory integrate_frame(const std::vector<std::function<double(double)>>& curvatures, double s_lo,
                                double s_hi, double step, const InitialFrame& initial, int reorth_every = 1000,
                                int record_every = 1);

/// Curvatures (k_1, k_2) = kappa_g (cos theta, sin theta) for n = 2: a curve
/// whose geodesic curvature along N_Theta is kappa_g and whose normal
/// component along Theta_perp vanishes.
std::vector<std::function<double(double)>> curvatures_for(const StripProfile& profile);

/// Max over samples of |<e_i, e_j> - delta_ij|.
double orthonormality_defect(const FrameSample& f);

/// Grid of points L_eps(s_i, t_j) = Gamma(s_i) + eps t_j N_Theta(s_i).
class EmbeddingGrid {
 public:
  EmbeddingGrid(GridSpec grid, std::vector<Eigen::VectorXd> points) : grid_(grid), points_(std::move(points)) {}
  const GridSpec& grid() const { return grid_; }
  const Eigen::VectorXd& point(int i, int j) const { return points_[static_cast<std::size_t>(i) * grid_.n_t + j]; }
  const std::vector<Eigen::VectorXd>& points() const { return points_; }

 private:
  GridSpec grid_;
  std::vector<Eigen::VectorXd> points_;
};

/// Requires the profile's angle function and frame samples at exactly the
/// grid's s nodes. Throws Unsupported without angle data.
EmbeddingGrid embed(const StripProfile& profile, const FrameTrajectory& frame, double epsilon, const GridSpec& grid);

/// Convenience: integrates the frame on the grid's s range and embeds.
EmbeddingGrid embed_profile(const StripProfile& profile, double epsilon, const GridSpec& grid);

/// Central-difference first fundamental form at interior node (i, j).
/// Throws InvalidInput at boundary nodes.
Eigen::Matrix2d first_fundamental_form(const EmbeddingGrid& embedding, int i, int j);

void write_xyz(std::ostream& out, const EmbeddingGrid& embedding);

}  // namespace dnstrip
