#pragma once

// Strip profiles: the geodesic curvature kappa_g = k.Theta and the twist speed
// tau = |Theta'| that fully determine the metric of a ruled strip, together
// with declared sup-norm bounds and a decay class.

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace dnstrip {

using RealFunction = std::function<double(double)>;

enum class DecayKind { compact_support, rational_decay, none };

struct DecayClass {
  DecayKind kind = DecayKind::none;
  double delta = 0.0;       // rational_decay: |g(s)| <= delta / (1 + s^2)
  double support_lo = 0.0;  // compact_support: g vanishes outside [lo, hi]
  double support_hi = 0.0;
  bool empty_support = false;

  static DecayClass compact(double lo, double hi) { return {DecayKind::compact_support, 0.0, lo, hi, false}; }
  static DecayClass vanishing() { return {DecayKind::compact_support, 0.0, 0.0, 0.0, true}; }
  static DecayClass rational(double delta) { return {DecayKind::rational_decay, delta, 0.0, 0.0, false}; }
  static DecayClass no_decay() { return {}; }
};

std::string to_string(DecayKind kind);

enum class Family { zero, constant, gaussian_bump, smooth_compact_bump, rational_twist };

std::string to_string(Family family);
Family family_from_string(const std::string& name);

/// Parameters of a built-in scalar shape. Which fields matter depends on the
/// family: gaussian_bump(amplitude, width, center), smooth_compact_bump(amplitude,
/// radius, center), rational_twist(delta, center), constant(amplitude), zero.
struct ProfileFamily {
  Family family = Family::zero;
  double amplitude = 0.0;
  double width = 1.0;
  double center = 0.0;
  double radius = 1.0;
  double delta = 0.0;
};

/// A scalar function of s with its first two derivatives, an antiderivative and
/// declared bounds. Used either as kappa_g or as the angle rate theta'.
struct Shape {
  Family family = Family::zero;
  RealFunction value;
  RealFunction d1;
  RealFunction d2;
  RealFunction antiderivative;  // vanishes at the shape center
  double sup = 0.0;
  double sup_d1 = 0.0;
  double sup_d2 = 0.0;
  DecayClass decay;
  double extent_lo = 0.0;  // outside [extent_lo, extent_hi] the shape is below 1e-30 (or exactly 0)
  double extent_hi = 0.0;
};

Shape make_shape(const ProfileFamily& params);

/// Angle realization Theta = (cos theta, sin theta) of the unit twisting vector
/// for n = 2.
struct AngleFunctions {
  RealFunction theta;
  RealFunction theta_d1;
  RealFunction theta_d2;
};

struct ProfileBounds {
  double sup_kappa = 0.0;        // ||k.Theta||_inf
  double sup_kappa_prime = 0.0;  // ||(k.Theta)'||_inf
  double sup_tau = 0.0;          // || |Theta'| ||_inf
  double sup_tau_prime = 0.0;    // || |Theta''| ||_inf
};

struct ProfileData {
  RealFunction kappa_g;
  RealFunction kappa_g_prime;
  RealFunction tau;
  RealFunction tau_prime;  // derivative of tau, needed by the flattened forms
  std::optional<AngleFunctions> angle;
  ProfileBounds bounds;
  DecayClass kappa_decay;
  DecayClass tau_decay;
  double extent_lo = 0.0;  // region carrying all geometry (for quadrature)
  double extent_hi = 0.0;
  std::string label;
};

/// Immutable strip profile. All evaluations are pure.
class StripProfile {
 public:
  explicit StripProfile(ProfileData data);

  /// Curvature channel and twist channel (the twist shape is theta').
  static StripProfile from_families(const ProfileFamily& curvature, const ProfileFamily& twist);
  static StripProfile flat();

  double kappa_g(double s) const { return data_.kappa_g(s); }
  double kappa_g_prime(double s) const { return data_.kappa_g_prime(s); }
  double tau(double s) const { return data_.tau(s); }
  double tau_prime(double s) const { return data_.tau_prime(s); }

  bool has_angle() const { return data_.angle.has_value(); }
  const AngleFunctions& angle() const;

  const ProfileBounds& bounds() const { return data_.bounds; }
  const DecayClass& kappa_decay() const { return data_.kappa_decay; }
  const DecayClass& tau_decay() const { return data_.tau_decay; }
  /// Combined decay class of (kappa_g, tau).
  DecayClass decay_class() const;

  double extent_lo() const { return data_.extent_lo; }
  double extent_hi() const { return data_.extent_hi; }
  const std::string& label() const { return data_.label; }

  /// Both channels declared identically zero.
  bool is_flat() const;
  bool is_untwisted() const { return tau_decay().kind == DecayKind::compact_support && tau_decay().empty_support; }
  bool is_unbent() const { return kappa_decay().kind == DecayKind::compact_support && kappa_decay().empty_support; }

 private:
  ProfileData data_;
};

struct HypothesisCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  double epsilon = 0.0;
  bool flat = false;
  bool admissible = false;           // eps * sup_kappa < 1 and all audits passed
  bool asymptotically_flat = false;  // kappa_g, tau -> 0 as |s| -> inf
  bool bent_hardy_hypothesis = false;  // kappa_g >= 0, kappa_g != 0, eps * sup_kappa <= x0
  std::vector<HypothesisCheck> checks;

  bool passed(const std::string& name) const;
};

/// Audits the declared data of `profile` and evaluates the geometric
/// hypotheses for the given strip width. `half_length` sets the sampling window
/// (decay samples reach 1e3 * half_length). Throws InvalidInput when epsilon is
/// not positive or a sample is not finite.
ValidationReport validate(const StripProfile& profile, double epsilon, double half_length = 10.0);

/// Value and closed-form partial derivatives of a metric coefficient.
struct MetricJet {
  double value = 1.0;
  double ds = 0.0;
  double dt = 0.0;
  double dtt = 0.0;
};

/// f_eps(s,t) = sqrt((1 - eps t kappa_g)^2 + eps^2 t^2 tau^2).
double metric_f(const StripProfile& profile, double epsilon, double s, double t);

/// h~_eps(s,t) = sqrt((1 - eps t kappa_g)^2 + eps t^2 tau^2), the metric of the
/// dilated strip. Only the twist term differs from metric_f.
double metric_h_scaled(const StripProfile& profile, double epsilon, double s, double t);

/// Pointwise kernel shared by both metrics: sqrt((1 - eps t k)^2 + c t^2 tau^2)
/// with c = twist_factor, together with its s- and t-derivatives.
MetricJet metric_jet(double epsilon, double twist_factor, double t, double kappa, double kappa_prime, double tau,
                     double tau_prime);

MetricJet metric_f_jet(const StripProfile& profile, double epsilon, double s, double t);
MetricJet metric_h_scaled_jet(const StripProfile& profile, double epsilon, double s, double t);

}  // namespace dnstrip
