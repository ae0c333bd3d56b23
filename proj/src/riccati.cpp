#include "pipebot/riccati.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

namespace pipebot {

namespace {

using Eigen::MatrixXd;
using Cplx = std::complex<double>;

double ric_residual(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q,
                    const Eigen::LLT<MatrixXd>& R_llt, const MatrixXd& P) {
  MatrixXd res = A.transpose() * P + P * A + Q -
                 P * B * R_llt.solve(B.transpose() * P);
  return res.norm();
}

// PBH test: for every eigenvalue with Re >= -margin the compound
// [A - lambda I, B] (stabilizability) or [A - lambda I; C] (detectability)
// must keep full rank n.
void pbh_check(const MatrixXd& A, const MatrixXd& BorC, bool input_side,
               const char* what) {
  const int n = static_cast<int>(A.rows());
  Eigen::EigenSolver<MatrixXd> es(A);
  for (int k = 0; k < n; ++k) {
    Cplx lam = es.eigenvalues()[k];
    if (lam.real() < -1e-9) continue;
    Eigen::MatrixXcd M;
    if (input_side) {
      M.resize(n, n + BorC.cols());
      M << (A.cast<Cplx>() - lam * Eigen::MatrixXcd::Identity(n, n)), BorC.cast<Cplx>();
    } else {
      M.resize(n + BorC.rows(), n);
      M << (A.cast<Cplx>() - lam * Eigen::MatrixXcd::Identity(n, n)), BorC.cast<Cplx>();
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    double smin = svd.singularValues()[svd.singularValues().size() - 1];
    double scale = std::max(1.0, A.norm());
    if (smin < 1e-10 * scale) {
      std::ostringstream os;
      os << what << ": mode lambda = " << lam.real();
      if (lam.imag() != 0) os << (lam.imag() > 0 ? " + " : " - ") << std::abs(lam.imag()) << "i";
      os << " fails the PBH rank test";
      throw SynthesisError(os.str());
    }
  }
}

// Bass eigenvalue-shift initial gain: solve (A+bI)X + X(A+bI)^T = 2BB^T with
// b beyond the spectrum, then K0 = B^T X^{-1} stabilizes A - B K0.
MatrixXd bass_gain(const MatrixXd& A, const MatrixXd& B) {
  const int n = static_cast<int>(A.rows());
  Eigen::EigenSolver<MatrixXd> es(A);
  double max_re = es.eigenvalues().real().maxCoeff();
  double beta = std::max(1.0, 2.0 * std::abs(max_re)) + 0.5 * A.norm();
  for (int attempt = 0; attempt < 6; ++attempt) {
    MatrixXd As = -(A + beta * MatrixXd::Identity(n, n)).transpose();
    MatrixXd X;
    try {
      X = solve_lyapunov(As, 2.0 * B * B.transpose());
    } catch (const NumericError&) {
      beta *= 2.0;
      continue;
    }
    // Ridge for stabilizable-but-uncontrollable pairs (X only PSD there).
    for (double eps : {0.0, 1e-12, 1e-9, 1e-6}) {
      MatrixXd Xr = X + eps * X.norm() * MatrixXd::Identity(n, n);
      Eigen::FullPivLU<MatrixXd> lu(Xr);
      if (!lu.isInvertible()) continue;
      MatrixXd K0 = B.transpose() * lu.inverse();
      if (is_hurwitz(A - B * K0)) return K0;
    }
    beta *= 2.0;
  }
  throw SynthesisError("could not construct an initial stabilizing gain");
}

}  // namespace

bool is_hurwitz(const MatrixXd& M, double margin) {
  Eigen::EigenSolver<MatrixXd> es(M);
  return es.eigenvalues().real().maxCoeff() < -margin;
}

CareSolution solve_riccati(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q,
                           const MatrixXd& R) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n ||
      R.rows() != m || R.cols() != m)
    throw SynthesisError("riccati: dimension mismatch");
  if (!Q.isApprox(Q.transpose(), 1e-10)) throw SynthesisError("riccati: Q not symmetric");
  if (!R.isApprox(R.transpose(), 1e-10)) throw SynthesisError("riccati: R not symmetric");

  Eigen::LLT<MatrixXd> R_llt(R);
  if (R_llt.info() != Eigen::Success)
    throw SynthesisError("riccati: R not positive definite");
  Eigen::SelfAdjointEigenSolver<MatrixXd> q_es(Q);
  if (q_es.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, Q.norm()))
    throw SynthesisError("riccati: Q not positive semidefinite");
  // Q^{1/2} for the detectability side of the PBH test.
  MatrixXd Q_half = q_es.operatorSqrt();

  pbh_check(A, B, /*input_side=*/true, "unstabilizable pair");
  pbh_check(A, Q_half, /*input_side=*/false, "undetectable pair");

  CareSolution sol;
  MatrixXd K = bass_gain(A, B);
  MatrixXd P_prev = MatrixXd::Zero(n, n);

  // Kleinman, "On an iterative technique for Riccati equation computations",
  // IEEE TAC 13 (1968): quadratically convergent, iterates stay stabilizing.
  for (int it = 1; it <= 60; ++it) {
    sol.iterations = it;
    MatrixXd Acl = A - B * K;
    if (!is_hurwitz(Acl))
      throw SynthesisError("riccati: Newton iterate lost stability");
    MatrixXd W = Q + K.transpose() * R * K;
    MatrixXd P = solve_lyapunov(Acl, W);
    MatrixXd K_next = R_llt.solve(B.transpose() * P);
    double dk = (K_next - K).norm() / std::max(1.0, K.norm());
    double dp = (P - P_prev).norm() / std::max(1.0, P.norm());
    K = K_next;
    P_prev = P;
    if (dk < 1e-13 && dp < 1e-13 && it > 1) break;
  }

  sol.P = 0.5 * (P_prev + P_prev.transpose());
  sol.K = R_llt.solve(B.transpose() * sol.P);
  sol.residual = ric_residual(A, B, Q, R_llt, sol.P);
  if (!(sol.residual <= 1e-9 * (1.0 + sol.P.norm())))
    throw SynthesisError("riccati: residual above tolerance");
  if (!is_hurwitz(A - B * sol.K))
    throw SynthesisError("riccati: closed loop not Hurwitz");
  return sol;
}

}  // namespace pipebot
