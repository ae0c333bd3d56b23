#include "pipebot/lyapunov.hpp"

#include <Eigen/Eigenvalues>
#include <vector>

namespace pipebot {

// Bartels, Stewart, "Solution of the matrix equation AX + XB = C",
// Comm. ACM 15 (1972). Real Schur variant, column-block forward sweep.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& W) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || W.rows() != n || W.cols() != n)
    throw NumericError("lyapunov: dimension mismatch");
  if (n == 0) return Eigen::MatrixXd();

  Eigen::RealSchur<Eigen::MatrixXd> schur(A);
  if (schur.info() != Eigen::Success) throw NumericError("lyapunov: Schur failed");
  const Eigen::MatrixXd U = schur.matrixU();
  const Eigen::MatrixXd T = schur.matrixT();

  // T^T Y + Y T = -W~,  Y = U^T X U.
  const Eigen::MatrixXd Wt = U.transpose() * W * U;

  // 1x1 / 2x2 diagonal block boundaries of the quasi-triangular T.
  std::vector<int> starts;
  for (int i = 0; i < n;) {
    starts.push_back(i);
    i += (i + 1 < n && T(i + 1, i) != 0.0) ? 2 : 1;
  }
  starts.push_back(n);

  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(n, n);
  const int nb = static_cast<int>(starts.size()) - 1;
  for (int bj = 0; bj < nb; ++bj) {
    const int j0 = starts[bj], q = starts[bj + 1] - j0;
    // RHS for column block: -W~ - contributions of already-solved columns.
    Eigen::MatrixXd C = -Wt.block(0, j0, n, q);
    if (j0 > 0) C -= Y.leftCols(j0) * T.block(0, j0, j0, q);
    const Eigen::MatrixXd Tjj = T.block(j0, j0, q, q);
    for (int bi = 0; bi < nb; ++bi) {
      const int i0 = starts[bi], p = starts[bi + 1] - i0;
      Eigen::MatrixXd rhs = C.block(i0, 0, p, q);
      if (i0 > 0)
        rhs -= T.block(0, i0, i0, p).transpose() * Y.block(0, j0, i0, q);
      // Small Sylvester T_ii^T S + S T_jj = rhs via Kronecker form.
      const Eigen::MatrixXd Tii = T.block(i0, i0, p, p);
      Eigen::MatrixXd M = Eigen::MatrixXd::Zero(p * q, p * q);
      Eigen::VectorXd b(p * q);
      for (int c = 0; c < q; ++c)
        for (int r = 0; r < p; ++r) {
          b[c * p + r] = rhs(r, c);
          for (int k = 0; k < p; ++k) M(c * p + r, c * p + k) += Tii(k, r);
          for (int k = 0; k < q; ++k) M(c * p + r, k * p + r) += Tjj(k, c);
        }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
      if (!lu.isInvertible())
        throw NumericError("lyapunov: singular diagonal solve (A not Hurwitz?)");
      Eigen::VectorXd s = lu.solve(b);
      for (int c = 0; c < q; ++c)
        for (int r = 0; r < p; ++r) Y(i0 + r, j0 + c) = s[c * p + r];
    }
  }

  Eigen::MatrixXd X = U * Y * U.transpose();
  return 0.5 * (X + X.transpose());
}

}  // namespace pipebot
