#pragma once

#include <stdexcept>
#include <string>

#include "kslab/grid.hpp"

namespace kslab {

struct SolveInfo {
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

struct SolverFailure : std::runtime_error {
  SolveInfo info;
  SolverFailure(const std::string& what, SolveInfo i)
      : std::runtime_error(what), info(i) {}
};

/* Inverts (I - lap) with the mirrored-ghost Laplacian: a symmetric M-matrix,
 * so the inverse is positivity preserving and bounded by the max principle.
 * Conjugate gradients with Jacobi preconditioning; the boundary rows have a
 * lighter diagonal, which the preconditioner accounts for exactly. */
class HelmholtzSolver {
 public:
  explicit HelmholtzSolver(GridPtr grid, double tol = 1e-10, int max_iter = 0);

  // z solving (I - lap) z = f.  Optional warm start; throws SolverFailure if
  // the residual target is out of reach.
  Field solve(const Field& f, SolveInfo* info = nullptr) const;
  Field solve(const Field& f, const Field& guess, SolveInfo* info) const;

  void apply(const Field& z, Field& out) const;  // out = (I - lap) z

  const GridPtr& grid() const { return grid_; }
  double tol() const { return tol_; }

 private:
  GridPtr grid_;
  double tol_;
  int max_iter_;
  std::vector<double> inv_diag_;
};

// ||z||_q / ||f||_1 for z = (I - lap)^-1 f, f nonnegative with positive mass.
// The exponent window is q in [1, inf) for n <= 2 and [1, n/(n-2)) for n >= 3.
double lq_ratio(const Field& z, const Field& f, double q, int n);

// integral of exp(A z); returns +infinity once any A*z exceeds 700 (the
// overflow guard doubles as the unbounded-moment sentinel).
double exp_moment(const Field& z, double A);

}  // namespace kslab
