#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace kslab::detail {

struct PcgResult {
  int iterations = 0;
  double rel_residual = 0.0;  // true residual over ||b||, recomputed at exit
  bool converged = false;
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

/* Preconditioned conjugate gradients on an SPD operator given as a callback,
 * Jacobi preconditioner given as the inverse diagonal.  Stops on the true
 * residual: the recursive residual is checked each sweep and the loop restarts
 * from a freshly computed b - A x whenever the recursion has drifted, so the
 * reported rel_residual is trustworthy down to the rounding floor. */
template <class Apply>
PcgResult pcg(const Apply& apply, const std::vector<double>& inv_diag,
              const std::vector<double>& b, std::vector<double>& x, double tol,
              int max_iter) {
  const std::size_t n = b.size();
  std::vector<double> r(n), z(n), p(n), ap(n);

  const double bnorm = norm2(b);
  PcgResult res;
  if (bnorm == 0.0) {
    x.assign(n, 0.0);
    res.converged = true;
    return res;
  }
  const double target = tol * bnorm;

  auto true_residual = [&]() {
    apply(x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
    return norm2(r);
  };

  double rnorm = true_residual();
  int total = 0;
  for (int restart = 0; restart < 4 && rnorm > target; ++restart) {
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = dot(r, z);
    for (; total < max_iter; ++total) {
      apply(p, ap);
      const double pap = dot(p, ap);
      if (!(pap > 0)) break;  // lost positive-definiteness to rounding
      const double alpha = rz / pap;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * ap[i];
      }
      rnorm = norm2(r);
      if (rnorm <= 0.5 * target) break;  // margin for recursion drift
      for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
      const double rz_next = dot(r, z);
      const double beta = rz_next / rz;
      rz = rz_next;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    rnorm = true_residual();  // re-anchor before deciding
  }

  res.iterations = total;
  res.rel_residual = rnorm / bnorm;
  res.converged = rnorm <= target;
  return res;
}

}  // namespace kslab::detail
