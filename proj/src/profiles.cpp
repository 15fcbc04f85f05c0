#include "dnstrip/profiles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dnstrip/errors.hpp"
#include "dnstrip/transverse.hpp"

namespace dnstrip {

namespace {

constexpr double kPi = std::numbers::pi;

// Largest value of a nonnegative function over [lo, hi] by dense sampling,
// inflated slightly so the declared bound sits above every audit sample.
double sampled_sup(const RealFunction& g, double lo, double hi, int samples = 40001) {
  double best = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double s = lo + (hi - lo) * i / (samples - 1);
    best = std::max(best, std::abs(g(s)));
  }
  return best * (1.0 + 1e-6);
}

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 8> kGl8Nodes = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                             -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                             0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGl8Weights = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                               0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                               0.2223810344533745, 0.1012285362903763};

double integrate(const RealFunction& g, double a, double b, int panels) {
  if (a == b) return 0.0;
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (std::size_t q = 0; q < kGl8Nodes.size(); ++q) sum += kGl8Weights[q] * g(mid + 0.5 * h * kGl8Nodes[q]);
  }
  return 0.5 * h * sum;
}

// max over s of (1 + s^2) * envelope(s - center), used to express a decaying
// bump as a rational_decay bound.
double rational_envelope(const RealFunction& envelope, double center, double reach) {
  double best = 0.0;
  const int samples = 200001;
  for (int i = 0; i < samples; ++i) {
    const double u = -reach + 2.0 * reach * i / (samples - 1);
    const double s = center + u;
    best = std::max(best, (1.0 + s * s) * std::abs(envelope(u)));
  }
  return best * (1.0 + 1e-6);
}

Shape zero_shape() {
  Shape sh;
  sh.family = Family::zero;
  sh.value = [](double) { return 0.0; };
  sh.d1 = sh.value;
  sh.d2 = sh.value;
  sh.antiderivative = sh.value;
  sh.decay = DecayClass::vanishing();
  return sh;
}

Shape constant_shape(double a) {
  Shape sh;
  sh.family = Family::constant;
  sh.value = [a](double) { return a; };
  sh.d1 = [](double) { return 0.0; };
  sh.d2 = sh.d1;
  sh.antiderivative = [a](double s) { return a * s; };
  sh.sup = std::abs(a);
  sh.decay = a == 0.0 ? DecayClass::vanishing() : DecayClass::no_decay();
  sh.extent_lo = -std::numeric_limits<double>::infinity();
  sh.extent_hi = std::numeric_limits<double>::infinity();
  return sh;
}

Shape gaussian_shape(double a, double w, double s0) {
  if (!(w > 0.0)) throw InvalidInput("gaussian_bump: width must be positive");
  Shape sh;
  sh.family = Family::gaussian_bump;
  sh.value = [a, w, s0](double s) {
    const double u = (s - s0) / w;
    return a * std::exp(-u * u);
  };
  sh.d1 = [a, w, s0](double s) {
    const double u = (s - s0) / w;
    return a * (-2.0 * u / w) * std::exp(-u * u);
  };
  sh.d2 = [a, w, s0](double s) {
    const double u = (s - s0) / w;
    return a * (4.0 * u * u - 2.0) / (w * w) * std::exp(-u * u);
  };
  sh.antiderivative = [a, w, s0](double s) { return a * w * 0.5 * std::sqrt(kPi) * std::erf((s - s0) / w); };
  sh.sup = std::abs(a);
  sh.sup_d1 = std::abs(a) * std::sqrt(2.0) * std::exp(-0.5) / w;
  sh.sup_d2 = 2.0 * std::abs(a) / (w * w);
  if (a == 0.0) {
    sh.decay = DecayClass::vanishing();
  } else {
    const double delta = rational_envelope([a, w](double u) { return a * std::exp(-(u / w) * (u / w)); }, s0, 12.0 * w);
    sh.decay = DecayClass::rational(delta);
  }
  sh.extent_lo = s0 - 9.0 * w;
  sh.extent_hi = s0 + 9.0 * w;
  return sh;
}

Shape compact_bump_shape(double a, double radius, double s0) {
  if (!(radius > 0.0)) throw InvalidInput("smooth_compact_bump: radius must be positive");
  Shape sh;
  sh.family = Family::smooth_compact_bump;
  auto phi = [](double u) {
    const double q = 1.0 - u * u;
    return q > 0.0 ? std::exp(1.0 - 1.0 / q) : 0.0;
  };
  sh.value = [a, radius, s0, phi](double s) { return a * phi((s - s0) / radius); };
  sh.d1 = [a, radius, s0, phi](double s) {
    const double u = (s - s0) / radius;
    const double q = 1.0 - u * u;
    if (q <= 0.0) return 0.0;
    return a * phi(u) * (-2.0 * u / (q * q)) / radius;
  };
  sh.d2 = [a, radius, s0, phi](double s) {
    const double u = (s - s0) / radius;
    const double q = 1.0 - u * u;
    if (q <= 0.0) return 0.0;
    const double q2 = q * q;
    return a * phi(u) * (4.0 * u * u / (q2 * q2) - 2.0 / q2 - 8.0 * u * u / (q2 * q)) / (radius * radius);
  };
  const RealFunction value = sh.value;
  sh.antiderivative = [value, s0, radius](double s) {
    const double lo = s0;
    const double hi = std::clamp(s, s0 - radius, s0 + radius);
    return integrate(value, lo, hi, 64);
  };
  sh.sup = std::abs(a);
  sh.sup_d1 = sampled_sup(sh.d1, s0 - radius, s0 + radius);
  sh.sup_d2 = sampled_sup(sh.d2, s0 - radius, s0 + radius);
  sh.decay = a == 0.0 ? DecayClass::vanishing() : DecayClass::compact(s0 - radius, s0 + radius);
  sh.extent_lo = s0 - radius;
  sh.extent_hi = s0 + radius;
  return sh;
}

Shape rational_shape(double delta, double s0) {
  Shape sh;
  sh.family = Family::rational_twist;
  sh.value = [delta, s0](double s) {
    const double u = s - s0;
    return delta / (1.0 + u * u);
  };
  sh.d1 = [delta, s0](double s) {
    const double u = s - s0;
    const double q = 1.0 + u * u;
    return -2.0 * delta * u / (q * q);
  };
  sh.d2 = [delta, s0](double s) {
    const double u = s - s0;
    const double q = 1.0 + u * u;
    return delta * (6.0 * u * u - 2.0) / (q * q * q);
  };
  sh.antiderivative = [delta, s0](double s) { return delta * std::atan(s - s0); };
  sh.sup = std::abs(delta);
  sh.sup_d1 = std::abs(delta) * 3.0 * std::sqrt(3.0) / 8.0;
  sh.sup_d2 = 2.0 * std::abs(delta);
  if (delta == 0.0) {
    sh.decay = DecayClass::vanishing();
  } else if (s0 == 0.0) {
    sh.decay = DecayClass::rational(std::abs(delta));
  } else {
    // (1 + s^2) / (1 + (s - s0)^2) is bounded; take its max on a wide window.
    sh.decay = DecayClass::rational(
        rational_envelope([delta](double u) { return delta / (1.0 + u * u); }, s0, 1e3 * (1.0 + std::abs(s0))));
  }
  sh.extent_lo = -std::numeric_limits<double>::infinity();
  sh.extent_hi = std::numeric_limits<double>::infinity();
  return sh;
}

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

std::string to_string(DecayKind kind) {
  switch (kind) {
    case DecayKind::compact_support:
      return "compact_support";
    case DecayKind::rational_decay:
      return "rational_decay";
    case DecayKind::none:
      return "none";
  }
  return "none";
}

std::string to_string(Family family) {
  switch (family) {
    case Family::zero:
      return "zero";
    case Family::constant:
      return "constant";
    case Family::gaussian_bump:
      return "gaussian_bump";
    case Family::smooth_compact_bump:
      return "smooth_compact_bump";
    case Family::rational_twist:
      return "rational_twist";
  }
  return "zero";
}

Family family_from_string(const std::string& name) {
  for (Family f : {Family::zero, Family::constant, Family::gaussian_bump, Family::smooth_compact_bump,
                   Family::rational_twist}) {
    if (to_string(f) == name) return f;
  }
  throw InvalidInput("unknown profile family '" + name + "'");
}

Shape make_shape(const ProfileFamily& p) {
  switch (p.family) {
    case Family::zero:
      return zero_shape();
    case Family::constant:
      return constant_shape(p.amplitude);
    case Family::gaussian_bump:
      return p.amplitude == 0.0 ? zero_shape() : gaussian_shape(p.amplitude, p.width, p.center);
    case Family::smooth_compact_bump:
      return p.amplitude == 0.0 ? zero_shape() : compact_bump_shape(p.amplitude, p.radius, p.center);
    case Family::rational_twist:
      return p.delta == 0.0 ? zero_shape() : rational_shape(p.delta, p.center);
  }
  return zero_shape();
}

StripProfile::StripProfile(ProfileData data) : data_(std::move(data)) {
  if (!data_.kappa_g || !data_.tau) throw InvalidInput("profile needs kappa_g and tau");
  if (!data_.kappa_g_prime) data_.kappa_g_prime = [](double) { return 0.0; };
  if (!data_.tau_prime) data_.tau_prime = [](double) { return 0.0; };
  const auto& b = data_.bounds;
  for (double v : {b.sup_kappa, b.sup_kappa_prime, b.sup_tau, b.sup_tau_prime}) {
    if (!std::isfinite(v) || v < 0.0) throw InvalidInput("declared sup norms must be finite and nonnegative");
  }
}

StripProfile StripProfile::from_families(const ProfileFamily& curvature, const ProfileFamily& twist) {
  const Shape c = make_shape(curvature);
  const Shape w = make_shape(twist);

  ProfileData d;
  d.kappa_g = c.value;
  d.kappa_g_prime = c.d1;
  d.tau = [v = w.value](double s) { return std::abs(v(s)); };
  d.tau_prime = [v = w.value, d1 = w.d1](double s) { return sign_of(v(s)) * d1(s); };
  d.angle = AngleFunctions{w.antiderivative, w.value, w.d1};
  d.bounds.sup_kappa = c.sup;
  d.bounds.sup_kappa_prime = c.sup_d1;
  d.bounds.sup_tau = w.sup;
  // Theta'' = -theta'^2 Theta + theta'' Theta_perp.
  d.bounds.sup_tau_prime = std::sqrt(w.sup * w.sup * w.sup * w.sup + w.sup_d1 * w.sup_d1);
  d.kappa_decay = c.decay;
  d.tau_decay = w.decay;

  const bool c_zero = c.decay.kind == DecayKind::compact_support && c.decay.empty_support;
  const bool w_zero = w.decay.kind == DecayKind::compact_support && w.decay.empty_support;
  if (c_zero && w_zero) {
    d.extent_lo = d.extent_hi = 0.0;
  } else if (c_zero) {
    d.extent_lo = w.extent_lo;
    d.extent_hi = w.extent_hi;
  } else if (w_zero) {
    d.extent_lo = c.extent_lo;
    d.extent_hi = c.extent_hi;
  } else {
    d.extent_lo = std::min(c.extent_lo, w.extent_lo);
    d.extent_hi = std::max(c.extent_hi, w.extent_hi);
  }
  std::ostringstream label;
  label << "curvature=" << to_string(curvature.family) << ",twist=" << to_string(twist.family);
  d.label = label.str();
  return StripProfile(std::move(d));
}

StripProfile StripProfile::flat() { return from_families(ProfileFamily{}, ProfileFamily{}); }

const AngleFunctions& StripProfile::angle() const {
  if (!data_.angle) throw Unsupported("profile carries no angle function theta(s)");
  return *data_.angle;
}

DecayClass StripProfile::decay_class() const {
  const DecayClass& a = data_.kappa_decay;
  const DecayClass& b = data_.tau_decay;
  if (a.kind == DecayKind::none || b.kind == DecayKind::none) return DecayClass::no_decay();
  if (a.kind == DecayKind::compact_support && b.kind == DecayKind::compact_support) {
    if (a.empty_support) return b;
    if (b.empty_support) return a;
    return DecayClass::compact(std::min(a.support_lo, b.support_lo), std::max(a.support_hi, b.support_hi));
  }
  double delta = 0.0;
  for (const DecayClass* c : {&a, &b}) {
    if (c->kind == DecayKind::rational_decay) delta = std::max(delta, c->delta);
  }
  return DecayClass::rational(delta);
}

bool StripProfile::is_flat() const { return is_untwisted() && is_unbent(); }

bool ValidationReport::passed(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c.passed;
  }
  throw InvalidInput("no hypothesis check named '" + name + "'");
}

namespace {

std::vector<double> audit_points(double half_length) {
  std::vector<double> pts;
  const int uniform = 4001;
  for (int i = 0; i < uniform; ++i) pts.push_back(-half_length + 2.0 * half_length * i / (uniform - 1));
  // Geometric tail grid up to 1e3 * L.
  for (double r = half_length; r <= 1e3 * half_length * (1.0 + 1e-12); r *= 1.05) {
    pts.push_back(r);
    pts.push_back(-r);
  }
  pts.push_back(1e3 * half_length);
  pts.push_back(-1e3 * half_length);
  std::sort(pts.begin(), pts.end());
  return pts;
}

bool decay_confirmed(const DecayClass& decay, const RealFunction& g, const std::vector<double>& pts,
                     std::string& detail) {
  constexpr double tol = 1e-10;
  std::ostringstream out;
  switch (decay.kind) {
    case DecayKind::none:
      out << "no decay declared";
      detail = out.str();
      return false;
    case DecayKind::compact_support:
      for (double s : pts) {
        const bool outside = decay.empty_support || s < decay.support_lo || s > decay.support_hi;
        if (outside && std::abs(g(s)) > tol) {
          out << "nonzero value " << g(s) << " at s=" << s << " outside declared support";
          detail = out.str();
          return false;
        }
      }
      detail = decay.empty_support ? "identically zero" : "vanishes outside declared support";
      return true;
    case DecayKind::rational_decay:
      for (double s : pts) {
        if (std::abs(g(s)) > decay.delta / (1.0 + s * s) + tol) {
          out << "|g(" << s << ")|=" << std::abs(g(s)) << " exceeds delta/(1+s^2)";
          detail = out.str();
          return false;
        }
      }
      out << "bounded by " << decay.delta << "/(1+s^2)";
      detail = out.str();
      return true;
  }
  return false;
}

}  // namespace

ValidationReport validate(const StripProfile& profile, double epsilon, double half_length) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InvalidInput("validate: epsilon must be positive");
  if (!(half_length > 0.0)) throw InvalidInput("validate: half_length must be positive");

  ValidationReport rep;
  rep.epsilon = epsilon;
  rep.flat = profile.is_flat();
  const auto pts = audit_points(half_length);
  const ProfileBounds& b = profile.bounds();

  double max_kappa = 0.0;
  double min_kappa = 0.0;
  double max_tau = 0.0;
  double min_tau = 0.0;
  double angle_err = 0.0;
  for (double s : pts) {
    const double k = profile.kappa_g(s);
    const double tau = profile.tau(s);
    const double kp = profile.kappa_g_prime(s);
    const double tp = profile.tau_prime(s);
    if (!std::isfinite(k) || !std::isfinite(tau) || !std::isfinite(kp) || !std::isfinite(tp)) {
      std::ostringstream msg;
      msg << "validate: non-finite profile sample at s=" << s;
      throw InvalidInput(msg.str());
    }
    max_kappa = std::max(max_kappa, std::abs(k));
    min_kappa = std::min(min_kappa, k);
    max_tau = std::max(max_tau, tau);
    min_tau = std::min(min_tau, tau);
    if (profile.has_angle()) {
      const double th = profile.angle().theta(s);
      const double th1 = profile.angle().theta_d1(s);
      if (!std::isfinite(th) || !std::isfinite(th1)) throw InvalidInput("validate: non-finite angle sample");
      angle_err = std::max(angle_err, std::abs(tau - std::abs(th1)));
    }
  }

  auto add = [&rep](std::string name, bool ok, std::string detail) {
    rep.checks.push_back({std::move(name), ok, std::move(detail)});
  };
  std::ostringstream d;

  d << "max sampled |kappa_g| = " << max_kappa << ", declared " << b.sup_kappa;
  const bool sup_ok = max_kappa <= b.sup_kappa * (1.0 + 1e-12) + 1e-300;
  add("sup_kappa_audit", sup_ok, d.str());

  d.str("");
  d << "max sampled tau = " << max_tau << ", declared " << b.sup_tau;
  const bool tau_sup_ok = max_tau <= b.sup_tau * (1.0 + 1e-12) + 1e-300;
  add("sup_tau_audit", tau_sup_ok, d.str());

  d.str("");
  d << "min sampled tau = " << min_tau;
  const bool tau_nonneg = min_tau >= 0.0;
  add("tau_nonnegative", tau_nonneg, d.str());

  if (profile.has_angle()) {
    d.str("");
    d << "max |tau - |theta'|| = " << angle_err;
    add("angle_consistency", angle_err <= 1e-12, d.str());
  }

  d.str("");
  const double thin = epsilon * b.sup_kappa;
  d << "eps * sup_kappa = " << thin;
  const bool thin_ok = thin < 1.0;
  add("thin_condition", thin_ok, d.str());

  std::string kd;
  std::string td;
  const bool kappa_decays = decay_confirmed(profile.kappa_decay(), [&](double s) { return profile.kappa_g(s); }, pts, kd);
  const bool tau_decays = decay_confirmed(profile.tau_decay(), [&](double s) { return profile.tau(s); }, pts, td);
  rep.asymptotically_flat = kappa_decays && tau_decays;
  add("asymptotic_flatness", rep.asymptotically_flat, "kappa_g: " + kd + "; tau: " + td);

  d.str("");
  const double x0 = find_x0();
  const bool nonneg = min_kappa >= 0.0;
  const bool nontrivial = max_kappa > 0.0;
  d << "eps * sup_kappa = " << thin << ", x0 = " << x0 << ", min kappa_g = " << min_kappa;
  rep.bent_hardy_hypothesis = nonneg && nontrivial && thin <= x0;
  add("hardy_threshold", thin <= x0, d.str());
  add("bent_hardy_hypothesis", rep.bent_hardy_hypothesis, d.str());

  rep.admissible = sup_ok && tau_sup_ok && tau_nonneg && thin_ok &&
                   (!profile.has_angle() || angle_err <= 1e-12);
  return rep;
}

MetricJet metric_jet(double eps, double c, double t, double k, double kp, double tau, double taup) {
  const double a = 1.0 - eps * t * k;
  const double g2 = a * a + c * t * t * tau * tau;
  MetricJet j;
  j.value = std::sqrt(g2);
  j.ds = (-eps * t * kp * a + c * t * t * tau * taup) / j.value;
  j.dt = (-eps * k * a + c * t * tau * tau) / j.value;
  j.dtt = (eps * eps * k * k + c * tau * tau) / j.value - j.dt * j.dt / j.value;
  return j;
}

MetricJet metric_f_jet(const StripProfile& p, double eps, double s, double t) {
  return metric_jet(eps, eps * eps, t, p.kappa_g(s), p.kappa_g_prime(s), p.tau(s), p.tau_prime(s));
}

MetricJet metric_h_scaled_jet(const StripProfile& p, double eps, double s, double t) {
  return metric_jet(eps, eps, t, p.kappa_g(s), p.kappa_g_prime(s), p.tau(s), p.tau_prime(s));
}

double metric_f(const StripProfile& p, double eps, double s, double t) {
  const double a = 1.0 - eps * t * p.kappa_g(s);
  const double b = eps * t * p.tau(s);
  return std::sqrt(a * a + b * b);
}

double metric_h_scaled(const StripProfile& p, double eps, double s, double t) {
  const double a = 1.0 - eps * t * p.kappa_g(s);
  const double tau = p.tau(s);
  return std::sqrt(a * a + eps * t * t * tau * tau);
}

}  // namespace dnstrip
