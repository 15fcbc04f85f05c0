#include "dnstrip/eigensolve.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <memory>
#include <random>

#include "dnstrip/errors.hpp"

namespace dnstrip {

namespace {

using Ldlt = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;

struct Factor {
  Ldlt ldlt;
  int negative = 0;
  bool ok = false;
};

void factor(Factor& F, const SparseMatrix& A, const SparseMatrix& B, double sigma) {
  SparseMatrix S = A - sigma * B;
  S.makeCompressed();
  F.ldlt.compute(S);
  F.ok = F.ldlt.info() == Eigen::Success;
  F.negative = 0;
  if (!F.ok) return;
  const auto& D = F.ldlt.vectorD();
  for (Eigen::Index i = 0; i < D.size(); ++i) {
    if (!std::isfinite(D[i]) || D[i] == 0.0) {
      F.ok = false;
      return;
    }
    if (D[i] < 0.0) ++F.negative;
  }
}

Eigen::VectorXd start_vector(Eigen::Index n) {
  std::mt19937_64 gen(0x5eed1234abcdULL);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    v[i] = 2.0 * u - 1.0;
  }
  return v;
}

double b_norm(const SparseMatrix& B, const Eigen::VectorXd& x) { return std::sqrt(std::max(0.0, x.dot(B * x))); }

void residuals(const SparseMatrix& A, const SparseMatrix& B, EigResult& r) {
  r.residuals.assign(r.eigenvalues.size(), 0.0);
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    const Eigen::VectorXd x = r.eigenvectors.col(static_cast<Eigen::Index>(i));
    const Eigen::VectorXd bx = B * x;
    r.residuals[i] = (A * x - r.eigenvalues[i] * bx).norm() / bx.norm();
  }
}

bool accepted(const EigResult& r, double tol) {
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    if (!(r.residuals[i] <= tol * std::max(1.0, std::abs(r.eigenvalues[i])))) return false;
  }
  return true;
}

// Sign convention for reproducible output: the entry of largest magnitude is positive.
void fix_signs(Eigen::MatrixXd& V) {
  for (Eigen::Index j = 0; j < V.cols(); ++j) {
    Eigen::Index imax = 0;
    V.col(j).cwiseAbs().maxCoeff(&imax);
    if (V(imax, j) < 0.0) V.col(j) = -V.col(j);
  }
}

}  // namespace

EigResult dense_eigenpairs(const SparseMatrix& A, const SparseMatrix& B) {
  const Eigen::MatrixXd Ad = Eigen::MatrixXd(A);
  const Eigen::MatrixXd Bd = Eigen::MatrixXd(B);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Ad, Bd);
  if (es.info() != Eigen::Success) throw SolverFailure("dense generalized eigensolver failed");
  EigResult r;
  r.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  r.eigenvectors = es.eigenvectors();
  fix_signs(r.eigenvectors);
  r.converged = true;
  residuals(A, B, r);
  return r;
}

int eigenvalue_count_below(const SparseMatrix& A, const SparseMatrix& B, double x) {
  Factor F;
  factor(F, A, B, x);
  if (!F.ok) {
    // x sits on (or numerically at) an eigenvalue; nudge it down.
    factor(F, A, B, x - 1e-10 * std::max(1.0, std::abs(x)));
    if (!F.ok) throw SolverFailure("LDL^T factorization failed while counting eigenvalues");
  }
  return F.negative;
}

EigResult lowest_eigenpairs(const SparseMatrix& A, const SparseMatrix& B, int k, double tol, double shift,
                            const EigOptions& opt) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.rows() != n || B.cols() != n) throw InvalidInput("lowest_eigenpairs: dimension mismatch");
  if (k < 1) throw InvalidInput("lowest_eigenpairs: k must be positive");
  if (!(tol > 0.0)) throw InvalidInput("lowest_eigenpairs: tol must be positive");
  if (k > n) k = static_cast<int>(n);

  if (n <= opt.dense_threshold) {
    EigResult all = dense_eigenpairs(A, B);
    EigResult r;
    r.eigenvalues.assign(all.eigenvalues.begin(), all.eigenvalues.begin() + k);
    r.eigenvectors = all.eigenvectors.leftCols(k);
    r.residuals.assign(all.residuals.begin(), all.residuals.begin() + k);
    r.converged = accepted(r, tol);
    r.shift = shift;
    return r;
  }

  Factor F;
  double sigma = shift;
  factor(F, A, B, sigma);
  if (!F.ok) {
    sigma = shift - 1e-6 * std::max(1.0, std::abs(shift));
    factor(F, A, B, sigma);
    if (!F.ok) throw SolverFailure("lowest_eigenpairs: factorization of A - shift B failed twice");
  }
  if (F.negative > 0) {
    throw InvalidInput("lowest_eigenpairs: shift lies above " + std::to_string(F.negative) + " eigenvalue(s)");
  }

  const int m = static_cast<int>(
      std::min<Eigen::Index>(n, opt.max_basis > 0 ? opt.max_basis : std::clamp(3 * k + 40, 60, 200)));
  EigResult best;
  best.shift = sigma;
  Eigen::VectorXd v = start_vector(n);
  int total = 0;

  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    Eigen::MatrixXd Q(n, m);
    std::vector<double> alpha;
    std::vector<double> beta;
    v /= b_norm(B, v);
    Q.col(0) = v;
    int used = 0;
    bool done = false;
    for (int j = 0; j < m; ++j) {
      const Eigen::VectorXd bq = B * Q.col(j);
      Eigen::VectorXd w = F.ldlt.solve(bq);
      ++total;
      alpha.push_back(bq.dot(w));
      w -= alpha.back() * Q.col(j);
      if (j > 0) w -= beta.back() * Q.col(j - 1);
      for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd bw = B * w;
        const Eigen::VectorXd c = Q.leftCols(j + 1).transpose() * bw;
        w -= Q.leftCols(j + 1) * c;
      }
      const double bnext = b_norm(B, w);
      used = j + 1;
      const bool invariant = bnext <= 1e-14 * std::abs(alpha.back());
      const bool check = used >= k && (used % 5 == 0 || used == m || invariant);
      if (check) {
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(used, used);
        for (int i = 0; i < used; ++i) {
          T(i, i) = alpha[i];
          if (i + 1 < used) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        // Largest theta <-> lowest lambda.
        EigResult r;
        r.shift = sigma;
        const int take = std::min(k, used);
        r.eigenvectors.resize(n, take);
        for (int i = 0; i < take; ++i) {
          const int idx = used - 1 - i;
          const double theta = es.eigenvalues()[idx];
          r.eigenvalues.push_back(sigma + 1.0 / theta);
          r.eigenvectors.col(i) = Q.leftCols(used) * es.eigenvectors().col(idx);
        }
        residuals(A, B, r);
        r.iterations = total;
        r.converged = take == k && accepted(r, tol);
        if (r.converged || used == m || invariant) {
          best = std::move(r);
          if (best.converged || invariant) {
            done = true;
            break;
          }
        }
      }
      if (invariant) break;
      if (j + 1 < m) {
        beta.push_back(bnext);
        Q.col(j + 1) = w / bnext;
      }
    }
    if (done) break;
    // Explicit restart from the sum of the wanted Ritz vectors.
    v = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < best.eigenvectors.cols(); ++i) v += best.eigenvectors.col(i);
    if (used < m) break;
  }
  if (best.eigenvalues.empty()) throw SolverFailure("lowest_eigenpairs: no Ritz pairs produced");
  // Sort ascending (Ritz values come out ascending already; keep it explicit).
  std::vector<int> order(best.eigenvalues.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return best.eigenvalues[a] < best.eigenvalues[b]; });
  EigResult sorted;
  sorted.shift = best.shift;
  sorted.iterations = best.iterations;
  sorted.eigenvectors.resize(n, static_cast<Eigen::Index>(order.size()));
  for (std::size_t i = 0; i < order.size(); ++i) {
    sorted.eigenvalues.push_back(best.eigenvalues[order[i]]);
    sorted.residuals.push_back(best.residuals[order[i]]);
    sorted.eigenvectors.col(static_cast<Eigen::Index>(i)) = best.eigenvectors.col(order[i]);
  }
  fix_signs(sorted.eigenvectors);
  sorted.converged = best.converged;
  return sorted;
}

EigResult lowest_eigenpairs(const FormPair& pair, int k, double tol, double shift, const EigOptions& opt) {
  return lowest_eigenpairs(pair.stiffness, pair.mass, k, tol, shift, opt);
}

EigResult lowest_eigenpairs_refined(const SparseMatrix& A, const SparseMatrix& B, int k, double tol,
                                    double shift_guess, const EigOptions& opt) {
  const Eigen::Index n = A.rows();
  if (n <= opt.dense_threshold) return lowest_eigenpairs(A, B, k, tol, shift_guess, opt);
  double sigma = shift_guess;
  for (int it = 0; eigenvalue_count_below(A, B, sigma) > 0; ++it) {
    if (it > 60) throw SolverFailure("lowest_eigenpairs_refined: could not find a shift below the spectrum");
    sigma -= std::max(1.0, std::abs(sigma)) * 0.05 * std::pow(2.0, it);
  }
  // One unrestarted Lanczos sweep gives Ritz estimates (upper bounds) of the
  // lowest k + 1 eigenvalues.
  const int probe_k = static_cast<int>(std::min<Eigen::Index>(n, k + 1));
  EigOptions probe_opt = opt;
  probe_opt.max_restarts = 0;
  probe_opt.max_basis = static_cast<int>(std::min<Eigen::Index>(n, std::max(60, 3 * probe_k + 20)));
  const EigResult probe = lowest_eigenpairs(A, B, probe_k, 1e-3, sigma, probe_opt);
  const double l1 = probe.eigenvalues.front();
  const double spread = std::max(probe.eigenvalues.back() - l1, 1e-7 * std::max(1.0, std::abs(l1)));

  double sigma2 = l1 - 0.2 * spread;
  for (int it = 0; sigma2 > sigma && eigenvalue_count_below(A, B, sigma2) > 0; ++it) {
    sigma2 -= 0.2 * spread * std::pow(2.0, it + 1);
  }
  sigma2 = std::max(sigma2, sigma);
  // Solve for one extra pair so the inertia check has an accurate upper neighbour.
  EigResult out = lowest_eigenpairs(A, B, probe_k, tol, sigma2, opt);
  out.iterations += probe.iterations;
  const double lk = out.eigenvalues[k - 1];
  const double upper = probe_k > k ? out.eigenvalues[k] : lk;
  if (probe_k > k) {
    out.eigenvalues.resize(k);
    out.residuals.resize(k);
    out.eigenvectors.conservativeResize(Eigen::NoChange, k);
  }
  // Certify that exactly k eigenvalues lie below a point just above lambda_k.
  if (out.converged) {
    const double mid = upper > lk ? 0.5 * (lk + upper) : lk + 1e-9 * std::max(1.0, std::abs(lk));
    if (eigenvalue_count_below(A, B, mid) != k) out.converged = false;
  }
  return out;
}

EigResult lowest_eigenpairs_refined(const FormPair& pair, int k, double tol, double shift_guess,
                                    const EigOptions& opt) {
  return lowest_eigenpairs_refined(pair.stiffness, pair.mass, k, tol, shift_guess, opt);
}

LinearMap shifted_resolvent(const SparseMatrix& A, const SparseMatrix& B, double sigma, const char* name) {
  auto F = std::make_shared<Factor>();
  factor(*F, A, B, sigma);
  if (!F->ok || F->negative > 0) {
    throw HypothesisViolation(std::string(name) +
                              ": shifted operator is not positive definite (kappa + inf kappa_g > 0 violated?)");
  }
  const SparseMatrix* Bp = &B;
  return [F, Bp](const Eigen::VectorXd& x) -> Eigen::VectorXd { return F->ldlt.solve(*Bp * x); };
}

double operator_gap_norm(const LinearMap& X, const LinearMap& Y, const SparseMatrix& B, double tol,
                         int max_iterations) {
  const Eigen::Index n = B.rows();
  Eigen::VectorXd v = start_vector(n);
  v /= b_norm(B, v);
  double estimate = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    const Eigen::VectorXd d1 = X(v) - Y(v);
    const Eigen::VectorXd d2 = X(d1) - Y(d1);
    // For a B-self-adjoint D: <D^2 v, v>_B = ||D v||_B^2.
    const double nd2 = b_norm(B, d2);
    const double next = std::sqrt(nd2);
    if (nd2 == 0.0) return 0.0;
    v = d2 / nd2;
    if (it > 2 && std::abs(next - estimate) <= tol * next) return next;
    estimate = next;
  }
  return estimate;
}

double resolvent_gap_norm(const SparseMatrix& A_L, const SparseMatrix& A_N, const SparseMatrix& B, double sigma,
                          double tol) {
  if (A_L.rows() != A_N.rows() || A_L.rows() != B.rows()) {
    throw InvalidInput("resolvent_gap_norm: operators live on different index spaces");
  }
  const LinearMap X = shifted_resolvent(A_L, B, sigma, "resolvent_gap_norm (first operator)");
  const LinearMap Y = shifted_resolvent(A_N, B, sigma, "resolvent_gap_norm (second operator)");
  return operator_gap_norm(X, Y, B, tol);
}

double resolvent_gap_norm(const FormPair& pair_L, const FormPair& pair_N, double shift_kappa, double tol) {
  if (!(shift_kappa > 0.0)) throw InvalidInput("resolvent_gap_norm: kappa must be positive");
  if (pair_L.size() != pair_N.size()) throw InvalidInput("resolvent_gap_norm: pairs differ in size");
  const double diff = (pair_L.mass - pair_N.mass).norm();
  if (diff > 1e-12 * pair_L.mass.norm()) throw InvalidInput("resolvent_gap_norm: pairs do not share the mass matrix");
  const double eps = pair_L.epsilon;
  if (!(eps > 0.0)) throw InvalidInput("resolvent_gap_norm: first pair carries no epsilon");
  const double sigma = std::pow(std::numbers::pi / (2.0 * eps), 2) - shift_kappa / eps;
  return resolvent_gap_norm(pair_L.stiffness, pair_N.stiffness, pair_L.mass, sigma, tol);
}

double resolvent_gap_norm_dense(const SparseMatrix& A_L, const SparseMatrix& A_N, const SparseMatrix& B,
                                double sigma) {
  const Eigen::MatrixXd Bd = Eigen::MatrixXd(B);
  const Eigen::MatrixXd L = Eigen::MatrixXd(A_L) - sigma * Bd;
  const Eigen::MatrixXd N = Eigen::MatrixXd(A_N) - sigma * Bd;
  // In B-orthonormal coordinates the difference is R^T (L^{-1} - N^{-1}) R, B = R^T R.
  const Eigen::LLT<Eigen::MatrixXd> chol(Bd);
  const Eigen::MatrixXd R = chol.matrixU();
  const Eigen::MatrixXd D = L.ldlt().solve(Eigen::MatrixXd::Identity(L.rows(), L.cols())) -
                            N.ldlt().solve(Eigen::MatrixXd::Identity(N.rows(), N.cols()));
  const Eigen::MatrixXd S = R * D * R.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace dnstrip
