#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "kslab/grid.hpp"

using namespace kslab;

namespace {
constexpr double kPi = 3.14159265358979323846;

// discrete symbol of the mirrored Laplacian for cos(pi x / L) at centers
double eig(double h, double L) {
  return -2.0 * (1.0 - std::cos(kPi * h / L)) / (h * h);
}
}  // namespace

TEST_CASE("grid geometry") {
  auto g = build_grid(2, {64, 64}, {1.0, 1.0});
  CHECK(g->h[0] == doctest::Approx(1.0 / 64).epsilon(1e-15));
  CHECK(g->ncell == 64u * 64u);
  CHECK(g->volume == doctest::Approx(1.0));
  CHECK(g->cell_vol == doctest::Approx(1.0 / 4096).epsilon(1e-15));
  CHECK(g->center(0, 0) == doctest::Approx(0.5 / 64));
  CHECK(g->center(0, 63) == doctest::Approx(1.0 - 0.5 / 64));

  auto g3 = build_grid(3, {8, 10, 12}, {1.0, 2.0, 3.0});
  CHECK(g3->ncell == 8u * 10u * 12u);
  CHECK(g3->volume == doctest::Approx(6.0));
  CHECK(g3->h[1] == doctest::Approx(0.2));
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(build_grid(0, {}, {}), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(4, {4, 4, 4, 4}, {1, 1, 1, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_grid(2, {64}, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(2, {64, 3}, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(1, {16}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(1, {16}, {-1.0}), std::invalid_argument);
}

TEST_CASE("laplacian of a constant is exactly zero") {
  auto g = build_grid(2, {16, 16}, {1.0, 1.0});
  Field f(g, 3.25);
  Field lap = laplacian_neumann(f);
  for (double x : lap.v) CHECK(x == 0.0);
}

TEST_CASE("axis cosine is an exact eigenvector of the mirrored laplacian") {
  // cos(pi x / L) respects the even reflection, so the discrete operator
  // acts on it as multiplication by its symbol, to rounding
  for (int n : {16, 32}) {
    auto g = build_grid(2, {n, n}, {1.0, 1.0});
    Field f(g);
    fill_from(f, [&](double x, double, double) { return std::cos(kPi * x); });
    Field lap = laplacian_neumann(f);
    const double lam = eig(g->h[0], 1.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      worst = std::max(worst, std::fabs(lap.v[i] - lam * f.v[i]));
    CHECK(worst <= 1e-9 * std::fabs(lam));
  }
}

TEST_CASE("laplacian converges at second order on the axis cosine") {
  // compare the discrete symbol against the continuous one
  const double exact = -kPi * kPi;
  const double e16 = std::fabs(eig(1.0 / 16, 1.0) - exact);
  const double e32 = std::fabs(eig(1.0 / 32, 1.0) - exact);
  const double order = std::log2(e16 / e32);
  CHECK(order >= 1.9);
  CHECK(order <= 2.1);
}

TEST_CASE("laplacian of random data integrates to zero") {
  auto g = build_grid(2, {32, 32}, {1.0, 1.0});
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Field f(g);
  for (double& x : f.v) x = uni(gen);
  Field lap = laplacian_neumann(f);
  CHECK(std::fabs(integrate(lap)) <= 1e-11 * g->volume);
}

TEST_CASE("laplacian is symmetric under the quadrature inner product") {
  auto g = build_grid(2, {24, 24}, {1.0, 1.0});
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Field f(g), p(g);
  for (double& x : f.v) x = uni(gen);
  for (double& x : p.v) x = uni(gen);
  Field lf = laplacian_neumann(f), lp = laplacian_neumann(p);
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    a += p.v[i] * lf.v[i];
    b += f.v[i] * lp.v[i];
  }
  a *= g->cell_vol;
  b *= g->cell_vol;
  CHECK(std::fabs(a - b) <= 1e-10 * std::max({std::fabs(a), std::fabs(b), 1.0}));
}

TEST_CASE("midpoint quadrature kills the odd cosine") {
  auto g = build_grid(1, {64}, {2.0});
  Field f(g);
  fill_from(f, [&](double x, double, double) { return std::cos(kPi * x / 2.0); });
  CHECK(std::fabs(integrate(f)) <= 1e-12 * g->length[0]);
}

TEST_CASE("lp norms on a single-cell spike") {
  auto g = build_grid(2, {16, 16}, {1.0, 1.0});
  Field f(g);
  f.v[37] = 2.0;
  const double cv = g->cell_vol;
  CHECK(lp_norm(f, 1.0) == doctest::Approx(2.0 * cv).epsilon(1e-14));
  CHECK(lp_norm(f, 2.0) == doctest::Approx(2.0 * std::sqrt(cv)).epsilon(1e-14));
  CHECK(lp_norm(f, std::numeric_limits<double>::infinity()) ==
        doctest::Approx(2.0));
  CHECK_THROWS_AS(lp_norm(f, 0.5), std::invalid_argument);
}

TEST_CASE("min and max scan the whole field") {
  auto g = build_grid(1, {8}, {1.0});
  Field f(g, 1.0);
  f.v[3] = -2.0;
  f.v[6] = 5.0;
  CHECK(min_value(f) == -2.0);
  CHECK(max_value(f) == 5.0);
}
