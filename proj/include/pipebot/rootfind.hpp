#pragma once

#include <functional>
#include <stdexcept>

namespace pipebot {

struct RootError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RootResult {
  double x = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

// Finds a root of f on [lo, hi]. f(lo) and f(hi) must bracket the root
// (opposite signs, or an endpoint already within tol). Bisection narrows the
// bracket; once it is tight a few secant steps polish the root, rejected if
// they leave the bracket. Throws RootError when the endpoints do not bracket.
RootResult find_root(const std::function<double(double)>& f, double lo, double hi,
                     double tol = 1e-12, int max_iter = 200);

}  // namespace pipebot
