#pragma once

#include <Eigen/Dense>

#include "pipebot/lyapunov.hpp"

namespace pipebot {

struct SynthesisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CareSolution {
  Eigen::MatrixXd P;  // stabilizing solution, symmetric PSD
  Eigen::MatrixXd K;  // R^{-1} B^T P
  double residual = 0.0;  // Frobenius norm of A^T P + P A + Q - P B R^{-1} B^T P
  int iterations = 0;
};

// Stabilizing solution of the continuous algebraic Riccati equation
//   A^T P + P A + Q - P B R^{-1} B^T P = 0
// by Kleinman's Newton iteration seeded with an eigenvalue-shift (Bass)
// stabilizing gain; every Lyapunov subproblem goes through Bartels-Stewart.
// Preconditions: R symmetric positive definite, Q symmetric PSD, (A, B)
// stabilizable and (A, Q) detectable — both verified by PBH rank tests, and a
// violation names the offending eigenvalue. Sized for n <= 8.
CareSolution solve_riccati(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                           const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R);

// True when all eigenvalues of M have real part < -margin.
bool is_hurwitz(const Eigen::MatrixXd& M, double margin = 0.0);

}  // namespace pipebot
