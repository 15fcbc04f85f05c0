#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dnstrip/errors.hpp"
#include "dnstrip/profiles.hpp"
#include "dnstrip/transverse.hpp"

using namespace dnstrip;

namespace {

ProfileFamily gauss(double a, double w = 1.0, double c = 0.0) { return {Family::gaussian_bump, a, w, c}; }

double central(const RealFunction& f, double s, double h = 1e-5) { return (f(s + h) - f(s - h)) / (2.0 * h); }

}  // namespace

TEST(Profiles, FlatProfileIsFlat) {
  const StripProfile p = StripProfile::flat();
  EXPECT_TRUE(p.is_flat());
  EXPECT_TRUE(p.is_unbent());
  EXPECT_TRUE(p.is_untwisted());
  EXPECT_EQ(p.kappa_g(3.0), 0.0);
  EXPECT_EQ(p.tau(-2.0), 0.0);
  EXPECT_DOUBLE_EQ(metric_f(p, 0.3, 1.0, 0.7), 1.0);
}

TEST(Profiles, GaussianValuesMatchClosedForm) {
  const StripProfile p = StripProfile::from_families(gauss(-1.5, 2.0, 0.5), ProfileFamily{});
  for (double s : {-3.0, 0.0, 0.5, 1.7, 6.0}) {
    const double u = (s - 0.5) / 2.0;
    EXPECT_NEAR(p.kappa_g(s), -1.5 * std::exp(-u * u), 1e-15);
  }
  EXPECT_DOUBLE_EQ(p.bounds().sup_kappa, 1.5);
}

// Derivatives of every family against central differences, random parameters.
TEST(Profiles, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> amp(-2.0, 2.0), wid(0.5, 3.0), pos(-3.0, 3.0);
  for (int k = 0; k < 40; ++k) {
    ProfileFamily c;
    ProfileFamily t;
    switch (k % 3) {
      case 0:
        c = gauss(amp(rng), wid(rng), pos(rng));
        t = gauss(amp(rng), wid(rng), pos(rng));
        break;
      case 1:
        c = {Family::smooth_compact_bump, amp(rng), 1.0, pos(rng), wid(rng)};
        t = {Family::rational_twist, 0.0, 1.0, pos(rng), 1.0, amp(rng)};
        break;
      default:
        c = {Family::rational_twist, 0.0, 1.0, pos(rng), 1.0, amp(rng)};
        t = {Family::smooth_compact_bump, amp(rng), 1.0, pos(rng), wid(rng)};
        break;
    }
    const StripProfile p = StripProfile::from_families(c, t);
    for (int i = 0; i < 15; ++i) {
      const double s = pos(rng) * 2.0;
      EXPECT_NEAR(p.kappa_g_prime(s), central([&](double x) { return p.kappa_g(x); }, s), 2e-6);
      // tau = |theta'| has a kink where theta' changes sign; skip those.
      if (p.tau(s) > 1e-3) {
        EXPECT_NEAR(p.tau_prime(s), central([&](double x) { return p.tau(x); }, s), 2e-6);
      }
      ASSERT_TRUE(p.has_angle());
      EXPECT_NEAR(p.angle().theta_d1(s), central(p.angle().theta, s), 2e-6);
      EXPECT_NEAR(std::abs(p.angle().theta_d1(s)), p.tau(s), 1e-14);
    }
  }
}

TEST(Profiles, CompactBumpVanishesOutsideSupport) {
  const StripProfile p =
      StripProfile::from_families(ProfileFamily{Family::smooth_compact_bump, 2.0, 1.0, 1.0, 1.5}, ProfileFamily{});
  EXPECT_EQ(p.kappa_g(-0.5), 0.0);
  EXPECT_EQ(p.kappa_g(2.5), 0.0);
  EXPECT_EQ(p.kappa_g(100.0), 0.0);
  EXPECT_NEAR(p.kappa_g(1.0), 2.0, 1e-15);
  EXPECT_EQ(p.kappa_decay().kind, DecayKind::compact_support);
  EXPECT_DOUBLE_EQ(p.kappa_decay().support_lo, -0.5);
  EXPECT_DOUBLE_EQ(p.kappa_decay().support_hi, 2.5);
}

TEST(Profiles, RationalTwistDecay) {
  const StripProfile p =
      StripProfile::from_families(ProfileFamily{}, ProfileFamily{Family::rational_twist, 0.0, 1.0, 0.0, 1.0, 0.01});
  EXPECT_EQ(p.tau_decay().kind, DecayKind::rational_decay);
  EXPECT_NEAR(p.tau_decay().delta, 0.01, 1e-15);
  for (double s : {0.0, 1.0, 10.0, 1e3}) EXPECT_NEAR(p.tau(s), 0.01 / (1.0 + s * s), 1e-18);
}

TEST(Profiles, UnknownFamilyRejected) {
  EXPECT_THROW(family_from_string("sawtooth"), InvalidInput);
  EXPECT_EQ(family_from_string("gaussian_bump"), Family::gaussian_bump);
  EXPECT_THROW(StripProfile::from_families(gauss(1.0, -1.0), ProfileFamily{}), InvalidInput);
}

TEST(Validate, ThinConditionAndHypotheses) {
  const StripProfile bent = StripProfile::from_families(gauss(0.5), ProfileFamily{});
  const ValidationReport ok = validate(bent, 1.0);
  EXPECT_TRUE(ok.admissible);
  EXPECT_TRUE(ok.asymptotically_flat);
  EXPECT_TRUE(ok.bent_hardy_hypothesis);  // 0.5 <= x0
  EXPECT_TRUE(ok.passed("thin_condition"));

  const ValidationReport wide = validate(bent, 1.5);  // 0.75 > x0
  EXPECT_TRUE(wide.admissible);
  EXPECT_FALSE(wide.bent_hardy_hypothesis);

  const ValidationReport bad = validate(bent, 2.0);  // eps sup = 1
  EXPECT_FALSE(bad.admissible);
  EXPECT_FALSE(bad.passed("thin_condition"));

  const StripProfile neg = StripProfile::from_families(gauss(-0.5), ProfileFamily{});
  EXPECT_FALSE(validate(neg, 0.1).bent_hardy_hypothesis);
  EXPECT_TRUE(validate(neg, 0.1).admissible);

  EXPECT_THROW(validate(bent, 0.0), InvalidInput);
  EXPECT_THROW(validate(bent, -0.1), InvalidInput);
}

TEST(Validate, ConstantCurvatureIsNotAsymptoticallyFlat) {
  const StripProfile p = StripProfile::from_families(ProfileFamily{Family::constant, 0.3}, ProfileFamily{});
  const ValidationReport v = validate(p, 0.1);
  EXPECT_FALSE(v.asymptotically_flat);
  EXPECT_TRUE(v.passed("thin_condition"));
}

TEST(Validate, ReportListsEveryCheck) {
  const ValidationReport v = validate(StripProfile::flat(), 0.1);
  EXPECT_TRUE(v.flat);
  for (const char* name : {"sup_kappa_audit", "sup_tau_audit", "thin_condition", "asymptotic_flatness"}) {
    EXPECT_TRUE(v.passed(name)) << name;
  }
}

// The declared sup bounds must dominate sampled values.
TEST(Validate, DeclaredBoundsDominateSamples) {
  const StripProfile p = StripProfile::from_families(gauss(-0.8, 1.3, 0.4), gauss(0.6, 0.7, -1.0));
  const ProfileBounds& b = p.bounds();
  for (int i = 0; i <= 4000; ++i) {
    const double s = -10.0 + 20.0 * i / 4000.0;
    EXPECT_LE(std::abs(p.kappa_g(s)), b.sup_kappa * (1 + 1e-12));
    EXPECT_LE(std::abs(p.kappa_g_prime(s)), b.sup_kappa_prime * (1 + 1e-12));
    EXPECT_LE(p.tau(s), b.sup_tau * (1 + 1e-12));
  }
}

TEST(Metric, FormulasAndJetDerivatives) {
  const StripProfile p = StripProfile::from_families(gauss(0.7, 1.2), gauss(1.1, 0.9, 0.3));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> S(-3.0, 3.0), T(0.05, 0.95), E(0.05, 0.8);
  for (int k = 0; k < 50; ++k) {
    const double s = S(rng), t = T(rng), e = E(rng);
    const double a = 1.0 - e * t * p.kappa_g(s);
    const double tau = p.tau(s);
    EXPECT_NEAR(metric_f(p, e, s, t), std::sqrt(a * a + e * e * t * t * tau * tau), 1e-14);
    EXPECT_NEAR(metric_h_scaled(p, e, s, t), std::sqrt(a * a + e * t * t * tau * tau), 1e-14);

    const MetricJet j = metric_f_jet(p, e, s, t);
    const double h = 1e-5;
    EXPECT_NEAR(j.value, metric_f(p, e, s, t), 1e-15);
    EXPECT_NEAR(j.ds, (metric_f(p, e, s + h, t) - metric_f(p, e, s - h, t)) / (2 * h), 1e-7);
    EXPECT_NEAR(j.dt, (metric_f(p, e, s, t + h) - metric_f(p, e, s, t - h)) / (2 * h), 1e-7);
    const double h2 = 1e-4;
    EXPECT_NEAR(j.dtt,
                (metric_f(p, e, s, t + h2) - 2 * metric_f(p, e, s, t) + metric_f(p, e, s, t - h2)) / (h2 * h2),
                1e-5);
    const MetricJet y = metric_h_scaled_jet(p, e, s, t);
    EXPECT_NEAR(y.dt, (metric_h_scaled(p, e, s, t + h) - metric_h_scaled(p, e, s, t - h)) / (2 * h), 1e-7);
    EXPECT_NEAR(y.ds, (metric_h_scaled(p, e, s + h, t) - metric_h_scaled(p, e, s - h, t)) / (2 * h), 1e-7);
  }
}

TEST(Metric, PositiveUnderThinCondition) {
  const StripProfile p = StripProfile::from_families(gauss(2.0), gauss(3.0));
  for (int i = 0; i <= 200; ++i) {
    for (int j = 0; j <= 20; ++j) {
      EXPECT_GT(metric_f(p, 0.49, -5.0 + 0.05 * i, 0.05 * j), 0.0);
    }
  }
}
