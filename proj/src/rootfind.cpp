#include "pipebot/rootfind.hpp"

#include <cmath>

namespace pipebot {

RootResult find_root(const std::function<double(double)>& f, double lo, double hi,
                     double tol, int max_iter) {
  double flo = f(lo);
  double fhi = f(hi);
  if (std::abs(flo) <= tol) return {lo, flo, 0};
  if (std::abs(fhi) <= tol) return {hi, fhi, 0};
  if (flo * fhi > 0) throw RootError("endpoints do not bracket a root");

  int it = 0;
  // Bisection until the bracket is narrow, then secant inside the bracket.
  while (it < max_iter) {
    ++it;
    double mid = 0.5 * (lo + hi);
    double fmid = f(mid);
    if (std::abs(fmid) <= tol || 0.5 * (hi - lo) < tol) {
      // Secant polish from the bracket endpoints; keep iterates bracketed.
      double a = lo, b = hi, fa = flo, fb = fhi;
      double x = mid, fx = fmid;
      for (int k = 0; k < 8 && std::abs(fx) > 0; ++k) {
        double denom = fb - fa;
        if (denom == 0) break;
        double cand = b - fb * (b - a) / denom;
        if (!(cand > lo && cand < hi)) break;
        double fcand = f(cand);
        ++it;
        a = b; fa = fb;
        b = cand; fb = fcand;
        if (std::abs(fcand) < std::abs(fx)) { x = cand; fx = fcand; }
      }
      return {x, fx, it};
    }
    if (flo * fmid <= 0) {
      hi = mid; fhi = fmid;
    } else {
      lo = mid; flo = fmid;
    }
  }
  double mid = 0.5 * (lo + hi);
  return {mid, f(mid), it};
}

}  // namespace pipebot
