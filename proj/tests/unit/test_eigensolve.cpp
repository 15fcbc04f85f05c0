#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "dnstrip/assembly.hpp"
#include "dnstrip/eigensolve.hpp"
#include "dnstrip/errors.hpp"

using namespace dnstrip;

namespace {

ProfileFamily gauss(double a, double w = 1.0) { return {Family::gaussian_bump, a, w, 0.0}; }

FormPair sample_pair(int ns = 61, int nt = 12) {
  const StripProfile p = StripProfile::from_families(gauss(-0.6), gauss(0.8));
  return assemble_b(p, 0.3, GridSpec{4.0, ns, nt});
}

}  // namespace

TEST(Eigensolve, SparseMatchesDense) {
  const FormPair F = sample_pair(40, 10);
  const auto dense = dense_eigenpairs(F.stiffness, F.mass).eigenvalues;
  EigOptions opt;
  opt.dense_threshold = 0;  // force the Lanczos path
  const EigResult r = lowest_eigenpairs(F, 5, 1e-10, dense[0] - 3.0, opt);
  ASSERT_TRUE(r.converged);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(r.eigenvalues[i], dense[i], 1e-8 * dense[i]);
}

TEST(Eigensolve, ResidualOrderAndOrthonormality) {
  const FormPair F = sample_pair();
  const double tol = 1e-9;
  const EigResult r = lowest_eigenpairs_refined(F, 4, tol, 10.0);
  ASSERT_TRUE(r.converged);
  for (int i = 0; i < 4; ++i) {
    EXPECT_LE(r.residuals[i], tol * std::max(1.0, std::abs(r.eigenvalues[i])));
    if (i) EXPECT_LE(r.eigenvalues[i - 1], r.eigenvalues[i]);
    const Eigen::VectorXd v = r.eigenvectors.col(i);
    const Eigen::VectorXd res = F.stiffness * v - r.eigenvalues[i] * (F.mass * v);
    EXPECT_LE(res.norm() / (F.mass * v).norm(), 10 * tol * std::max(1.0, r.eigenvalues[i]));
  }
  const Eigen::MatrixXd G = r.eigenvectors.transpose() * (F.mass * r.eigenvectors);
  EXPECT_LE((G - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Eigensolve, RefinedAgreesWithPlain) {
  const FormPair F = sample_pair();
  const EigResult a = lowest_eigenpairs(F, 3, 1e-10, 0.0);
  const EigResult b = lowest_eigenpairs_refined(F, 3, 1e-10, 0.0);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(a.eigenvalues[i], b.eigenvalues[i], 1e-8 * a.eigenvalues[i]);
}

TEST(Eigensolve, ShiftAboveSpectrumRejected) {
  const FormPair F = sample_pair();
  const double l1 = lowest_eigenpairs_refined(F, 1, 1e-10, 0.0).eigenvalues[0];
  EXPECT_THROW(lowest_eigenpairs(F, 1, 1e-9, l1 + 1.0), InvalidInput);
  EXPECT_THROW(lowest_eigenpairs(F, 0, 1e-9, 0.0), InvalidInput);
}

TEST(Eigensolve, InertiaCountMatchesDense) {
  const FormPair F = sample_pair(30, 9);
  const auto all = dense_eigenpairs(F.stiffness, F.mass).eigenvalues;
  for (double x : {all[0] - 1.0, 0.5 * (all[2] + all[3]), 0.5 * (all[9] + all[10])}) {
    const int want = static_cast<int>(std::count_if(all.begin(), all.end(), [x](double v) { return v < x; }));
    EXPECT_EQ(eigenvalue_count_below(F.stiffness, F.mass, x), want);
  }
}

TEST(Eigensolve, Deterministic) {
  const FormPair F = sample_pair();
  const EigResult a = lowest_eigenpairs_refined(F, 2, 1e-10, 0.0);
  const EigResult b = lowest_eigenpairs_refined(F, 2, 1e-10, 0.0);
  EXPECT_EQ(a.eigenvalues, b.eigenvalues);
  EXPECT_EQ(a.iterations, b.iterations);
}

// Random symmetric positive pencils: Lanczos agrees with the dense solver.
TEST(Eigensolve, RandomPencilsProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 300;
    std::vector<Eigen::Triplet<double>> ta, tb;
    for (int i = 0; i < n; ++i) {
      ta.emplace_back(i, i, 2.0 + u(rng));
      if (i + 1 < n) {
        const double c = -u(rng) * 0.5;
        ta.emplace_back(i, i + 1, c);
        ta.emplace_back(i + 1, i, c);
      }
      tb.emplace_back(i, i, u(rng));
    }
    SparseMatrix A(n, n), B(n, n);
    A.setFromTriplets(ta.begin(), ta.end());
    B.setFromTriplets(tb.begin(), tb.end());
    const auto dense = dense_eigenpairs(A, B).eigenvalues;
    const EigResult r = lowest_eigenpairs(A, B, 3, 1e-11, 0.0);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(r.eigenvalues[i], dense[i], 1e-9);
  }
}

TEST(ResolventGap, IdenticalOperatorsGiveZero) {
  const StripProfile p = StripProfile::from_families(gauss(0.8), ProfileFamily{});
  const FormPair D = assemble_d(p, 0.2, GridSpec{3.0, 31, 10});
  EXPECT_EQ(resolvent_gap_norm(D, D, 1.0, 1e-8), 0.0);
}

TEST(ResolventGap, SparseMatchesDenseOracle) {
  const StripProfile p = StripProfile::from_families(gauss(0.8), ProfileFamily{});
  const double eps = 0.2, kappa = 1.0;
  const GridSpec g{3.0, 40, 10};
  const FormPair D = assemble_d(p, eps, g);
  const FormPair H = assemble_decoupled(p, eps, g);
  const double sigma = std::pow(M_PI / (2 * eps), 2) - kappa / eps;
  const double sparse = resolvent_gap_norm(D, H, kappa, 1e-10);
  const double dense = resolvent_gap_norm_dense(D.stiffness, H.stiffness, D.mass, sigma);
  EXPECT_NEAR(sparse, dense, 1e-6 * dense);
}

TEST(ResolventGap, NonPositiveShiftedOperatorRejected) {
  const StripProfile p = StripProfile::from_families(gauss(-3.0), ProfileFamily{});
  const FormPair D = assemble_d(p, 0.2, GridSpec{3.0, 31, 10});
  const FormPair H = assemble_decoupled(p, 0.2, GridSpec{3.0, 31, 10});
  EXPECT_THROW(resolvent_gap_norm(D, H, 0.5, 1e-8), HypothesisViolation);
}
