#include "kslab/helmholtz.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "kslab/detail/pcg.hpp"

namespace kslab {

namespace {

// out = (I - lap) in, mirrored ghosts, raw arrays
void apply_helmholtz_raw(const Grid& g, const double* s, double* d) {
  const int nx = g.extent[0], ny = g.extent[1], nz = g.extent[2];
  const double ix2 = 1.0 / (g.h[0] * g.h[0]);
  const double iy2 = g.dim > 1 ? 1.0 / (g.h[1] * g.h[1]) : 0.0;
  const double iz2 = g.dim > 2 ? 1.0 / (g.h[2] * g.h[2]) : 0.0;
  const std::size_t sx = 1, sy = static_cast<std::size_t>(nx),
                    sz = static_cast<std::size_t>(nx) * ny;
  std::size_t i = 0;
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x, ++i) {
        const double c = s[i];
        double acc = 0.0;
        {
          const double l = x > 0 ? s[i - sx] : c;
          const double r = x < nx - 1 ? s[i + sx] : c;
          acc += (l - 2.0 * c + r) * ix2;
        }
        if (ny > 1) {
          const double l = y > 0 ? s[i - sy] : c;
          const double r = y < ny - 1 ? s[i + sy] : c;
          acc += (l - 2.0 * c + r) * iy2;
        }
        if (nz > 1) {
          const double l = z > 0 ? s[i - sz] : c;
          const double r = z < nz - 1 ? s[i + sz] : c;
          acc += (l - 2.0 * c + r) * iz2;
        }
        d[i] = c - acc;
      }
}

}  // namespace

HelmholtzSolver::HelmholtzSolver(GridPtr grid, double tol, int max_iter)
    : grid_(std::move(grid)), tol_(tol), max_iter_(max_iter) {
  if (!grid_) throw std::invalid_argument("solver needs a grid");
  if (!(tol_ > 0) || tol_ >= 1)
    throw std::invalid_argument("solver tolerance must sit in (0, 1)");
  const Grid& g = *grid_;
  if (max_iter_ <= 0) {
    // CG iteration count scales with sqrt(cond) ~ 1/h; leave generous room
    int longest = 0;
    for (int a = 0; a < g.dim; ++a) longest = std::max(longest, g.extent[a]);
    max_iter_ = 200 + 40 * longest;
  }

  // diagonal of (I - lap): 1 + sum over axes of (#interior neighbors)/h^2
  inv_diag_.assign(g.ncell, 0.0);
  const int nx = g.extent[0], ny = g.extent[1], nz = g.extent[2];
  const double ix2 = 1.0 / (g.h[0] * g.h[0]);
  const double iy2 = g.dim > 1 ? 1.0 / (g.h[1] * g.h[1]) : 0.0;
  const double iz2 = g.dim > 2 ? 1.0 / (g.h[2] * g.h[2]) : 0.0;
  std::size_t i = 0;
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x, ++i) {
        double d = 1.0;
        d += ((x > 0 ? 1 : 0) + (x < nx - 1 ? 1 : 0)) * ix2;
        if (ny > 1) d += ((y > 0 ? 1 : 0) + (y < ny - 1 ? 1 : 0)) * iy2;
        if (nz > 1) d += ((z > 0 ? 1 : 0) + (z < nz - 1 ? 1 : 0)) * iz2;
        inv_diag_[i] = 1.0 / d;
      }
}

void HelmholtzSolver::apply(const Field& z, Field& out) const {
  if (z.grid != grid_)
    throw std::invalid_argument("field grid does not match solver grid");
  if (out.grid != grid_) out = Field(grid_);
  apply_helmholtz_raw(*grid_, z.v.data(), out.v.data());
}

Field HelmholtzSolver::solve(const Field& f, SolveInfo* info) const {
  return solve(f, f, info);  // f itself is a decent starting point
}

Field HelmholtzSolver::solve(const Field& f, const Field& guess,
                             SolveInfo* info) const {
  if (f.grid != grid_)
    throw std::invalid_argument("field grid does not match solver grid");
  Field z = guess.grid == grid_ ? guess : Field(grid_);
  auto apply_op = [this](const std::vector<double>& in,
                         std::vector<double>& out) {
    out.resize(in.size());
    apply_helmholtz_raw(*grid_, in.data(), out.data());
  };

  detail::PcgResult r =
      detail::pcg(apply_op, inv_diag_, f.v, z.v, tol_, max_iter_);
  if (info) {
    info->iterations = r.iterations;
    info->rel_residual = r.rel_residual;
    info->converged = r.converged;
  }
  if (!r.converged)
    throw SolverFailure(
        "screened-Poisson solve stalled at relative residual " +
            std::to_string(r.rel_residual),
        {r.iterations, r.rel_residual, false});
  return z;
}

double lq_ratio(const Field& z, const Field& f, double q, int n) {
  if (n < 1) throw std::invalid_argument("lq_ratio needs n >= 1");
  if (std::isinf(q)) throw std::invalid_argument("lq_ratio needs finite q");
  if (!(q >= 1.0)) throw std::invalid_argument("lq_ratio needs q >= 1");
  if (n >= 3 && !(q < double(n) / (n - 2)))
    throw std::invalid_argument("lq_ratio needs q < n/(n-2) when n >= 3");
  const double mass = integrate(f);
  if (!(mass > 0)) throw std::invalid_argument("lq_ratio needs positive mass");
  return lp_norm(z, q) / mass;
}

double exp_moment(const Field& z, double A) {
  double s = 0.0;
  for (double x : z.v) {
    const double e = A * x;
    if (e > 700.0) return std::numeric_limits<double>::infinity();
    s += std::exp(e);
  }
  return s * z.grid->cell_vol;
}

}  // namespace kslab
