#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace pipebot {

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Solves A^T X + X A + W = 0 for X (W symmetric, A Hurwitz) by the
// Bartels-Stewart method: real Schur reduction of A, then block
// back-substitution on the quasi-triangular factor. Sized for n <= 8.
// Throws NumericError when a diagonal solve is singular (A not Hurwitz or
// eigenvalue pairing lambda_i + lambda_j = 0).
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& W);

}  // namespace pipebot
