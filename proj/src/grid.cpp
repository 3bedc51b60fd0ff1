#include "kslab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace kslab {

GridPtr build_grid(int dim, const std::vector<int>& extents,
                   const std::vector<double>& lengths) {
  if (dim < 1 || dim > 3)
    throw std::invalid_argument("grid dimension must be 1, 2, or 3, got " +
                                std::to_string(dim));
  if (static_cast<int>(extents.size()) != dim ||
      static_cast<int>(lengths.size()) != dim)
    throw std::invalid_argument("grid needs exactly one extent and one length per axis");

  auto g = std::make_shared<Grid>();
  g->dim = dim;
  g->ncell = 1;
  g->volume = 1.0;
  for (int a = 0; a < dim; ++a) {
    if (extents[a] < 4)
      throw std::invalid_argument("axis " + std::to_string(a) +
                                  " needs at least 4 cells, got " +
                                  std::to_string(extents[a]));
    if (!(lengths[a] > 0.0))
      throw std::invalid_argument("axis " + std::to_string(a) +
                                  " length must be positive");
    g->extent[a] = extents[a];
    g->length[a] = lengths[a];
    g->h[a] = lengths[a] / extents[a];
    g->ncell *= static_cast<std::size_t>(extents[a]);
    g->volume *= lengths[a];
  }
  g->cell_vol = g->volume / static_cast<double>(g->ncell);
  return g;
}

void laplacian_neumann(const Grid& g, const double* s, double* d) {
  const int nx = g.extent[0], ny = g.extent[1], nz = g.extent[2];
  const double ix2 = 1.0 / (g.h[0] * g.h[0]);
  const double iy2 = g.dim > 1 ? 1.0 / (g.h[1] * g.h[1]) : 0.0;
  const double iz2 = g.dim > 2 ? 1.0 / (g.h[2] * g.h[2]) : 0.0;
  const std::size_t sx = 1, sy = static_cast<std::size_t>(nx),
                    sz = static_cast<std::size_t>(nx) * ny;

  std::size_t i = 0;
  for (int z = 0; z < nz; ++z) {
    for (int y = 0; y < ny; ++y) {
      for (int x = 0; x < nx; ++x, ++i) {
        const double c = s[i];
        // mirrored ghost == first interior value, so a boundary cell
        // contributes (neighbor - center) and interior (l - 2c + r)
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
        d[i] = acc;
      }
    }
  }
}

void laplacian_neumann(const Field& f, Field& out) {
  if (out.grid != f.grid) out = Field(f.grid);
  laplacian_neumann(*f.grid, f.v.data(), out.v.data());
}

Field laplacian_neumann(const Field& f) {
  Field out(f.grid);
  laplacian_neumann(f, out);
  return out;
}

double integrate(const Field& f) {
  double s = 0.0;
  for (double x : f.v) s += x;
  return s * f.grid->cell_vol;
}

double lp_norm(const Field& f, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : f.v) m = std::max(m, std::fabs(x));
    return m;
  }
  if (!(p >= 1.0))
    throw std::invalid_argument("lp_norm needs p >= 1 or infinity");
  double s = 0.0;
  for (double x : f.v) s += std::pow(std::fabs(x), p);
  return std::pow(s * f.grid->cell_vol, 1.0 / p);
}

double min_value(const Field& f) {
  double m = std::numeric_limits<double>::infinity();
  for (double x : f.v) m = std::min(m, x);
  return m;
}

double max_value(const Field& f) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : f.v) m = std::max(m, x);
  return m;
}

}  // namespace kslab
