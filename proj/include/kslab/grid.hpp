#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

namespace kslab {

/* Uniform cell-centered rectangular grid, 1 to 3 axes, at least 4 cells per
 * axis.  Cell centers along axis a sit at (i + 1/2) * h[a].  Every operator in
 * this library closes the boundary by mirror (even) reflection across the
 * boundary faces: the ghost value equals the first interior value, so the
 * normal flux through every face of the boundary vanishes identically. */
struct Grid {
  int dim = 0;
  std::array<int, 3> extent{1, 1, 1};      // cells per axis; 1 on unused axes
  std::array<double, 3> length{1, 1, 1};   // physical size per axis
  std::array<double, 3> h{1, 1, 1};        // spacing, length/extent
  std::size_t ncell = 0;
  double volume = 0;   // domain measure
  double cell_vol = 0; // volume / ncell, the midpoint quadrature weight

  // center coordinate of cell index i along axis a
  double center(int a, int i) const { return (i + 0.5) * h[a]; }

  std::size_t index(int x, int y, int z) const {
    return (static_cast<std::size_t>(z) * extent[1] + y) * extent[0] + x;
  }
};

using GridPtr = std::shared_ptr<const Grid>;

// Throws std::invalid_argument on dim outside [1,3], size mismatch,
// extent < 4 on an active axis, or non-positive length.
GridPtr build_grid(int dim, const std::vector<int>& extents,
                   const std::vector<double>& lengths);

// Scalar field of cell averages over a grid.  Plain data; the grid handle is
// shared and immutable.
struct Field {
  GridPtr grid;
  std::vector<double> v;

  Field() = default;
  explicit Field(GridPtr g, double fill = 0.0)
      : grid(std::move(g)), v(grid->ncell, fill) {}

  std::size_t size() const { return v.size(); }
  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }
};

// Second-order centered five/seven-point Laplacian with mirrored ghosts.
// Row sums and column sums of the underlying matrix are exactly zero, which
// is what makes conservation structural downstream.
void laplacian_neumann(const Grid& g, const double* src, double* dst);
void laplacian_neumann(const Field& f, Field& out);
Field laplacian_neumann(const Field& f);

// Midpoint quadrature: cell_vol * sum of values.
double integrate(const Field& f);

// L^p norm under midpoint quadrature; p = infinity() gives max |f|.
double lp_norm(const Field& f, double p);

double min_value(const Field& f);
double max_value(const Field& f);

// Fills f by evaluating fn at cell centers.  Fn: (x, y, z) -> double, with
// unused coordinates passed as 0.
template <class Fn>
void fill_from(Field& f, Fn&& fn) {
  const Grid& g = *f.grid;
  std::size_t i = 0;
  for (int z = 0; z < g.extent[2]; ++z)
    for (int y = 0; y < g.extent[1]; ++y)
      for (int x = 0; x < g.extent[0]; ++x, ++i)
        f.v[i] = fn(g.center(0, x), g.dim > 1 ? g.center(1, y) : 0.0,
                    g.dim > 2 ? g.center(2, z) : 0.0);
}

}  // namespace kslab
