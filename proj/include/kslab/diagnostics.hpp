#pragma once

#include <array>
#include <limits>
#include <utility>
#include <vector>

#include "kslab/grid.hpp"
#include "kslab/helmholtz.hpp"
#include "kslab/motility.hpp"

namespace kslab {

/* Trajectory residuals.  Both take two consecutive accepted states and the
 * step that separates them; the time derivative uses the same backward
 * difference as the scheme, so what remains measures how far the discrete
 * trajectory sits from the continuous identity (the motility freeze is the
 * leading term, first order in dt).
 *
 * key identity:  d/dt w + gamma(v) u = (I - lap)^-1 [gamma(v) u],  w = (I-lap)^-1 u
 * reduced form (eps = 0, where v coincides with w):
 *                d/dt v - gamma(v) lap v + v gamma(v) = (I - lap)^-1 [gamma(v) u]
 * Returns the L2 norm of the defect. */
double key_identity_residual(const Motility& m, const HelmholtzSolver& H,
                             const Field& w_prev, const Field& w,
                             const Field& v, const Field& u, double dt);

// Requires eps == 0 (throws std::invalid_argument otherwise): the reduced
// identity only exists when the signal equation is elliptic.
double kid0_residual(const Motility& m, const HelmholtzSolver& H,
                     const Field& v_prev, const Field& v, const Field& u,
                     double dt, double eps);

// min over cells of w0 * exp(gamma_at_vstar * t) - w; exactly zero at t = 0.
double envelope_margin(const Field& w, const Field& w0, double t,
                       double gamma_at_vstar);

// min over cells of ctilde * (w + K) - v.
double comparison_margin(const Field& v, const Field& w, double ctilde,
                         double K);

// integral of u^(1+p) * gamma(v)^q.
double weighted_energy(const Field& u, const Field& v, double p, double q,
                       const Motility& m);

// lambda_{p,0} = 1, lambda_{p,j} = (p + 1 - j) lambda_{p,j-1} / j: the
// binomial row C(p, j), j = 0..p.
std::vector<double> lambda_weights(int p);

// min over log-spaced samples of gamma gamma'' - (p+1) gamma'^2; the energy
// chain for exponent p closes exactly when this stays nonnegative.
double a3b_condition_margin(const Motility& m, double p, double s_min,
                            double s_max, int samples = 256);

/* Iteration ladder of integrability exponents for n >= 3:
 * p_0 = qstar/2 with qstar = 2n/(n-2), p_r = 2 p_{r-1} - n k / 2, which
 * closes to p_r = 2^(r-1) (qstar - n k) + n k / 2 and increases without
 * bound exactly when k < 2/(n-2). */
struct MoserLadder {
  int n = 0;
  double k = 0;
  double qstar = 0;
  double normalizer = 0;  // 2 / (qstar - n k)
  std::vector<double> p;  // p_0 .. p_rmax
};

MoserLadder moser_ladder(int n, double k, int rmax);

/* Interpolation exponent used when lifting L^q control to L^p along the
 * ladder pair p = 2q - nk/2:
 *   alpha = (p - k)(p - q) / (p (p - k - 2 q / qstar)),  in (0, 1),
 * along with the four rational invariants of the lift, which equal
 * 2, 2/(n+2), n/2, (n+2)/2 identically on ladder pairs. */
struct MoserAlpha {
  double alpha = 0;
  std::array<double, 4> ratios{};
};

MoserAlpha moser_alpha(double p, double q, double k, int n);

/* Sliding-window comparison bound: given samples of y, g, h on a common time
 * axis with y' <= g y + h between samples, every window [t, t+r] must satisfy
 *   y(t + r) <= (a3 / r + a2) exp(a1),
 * a1 = int g, a2 = int h, a3 = int y over the window (trapezoid rule). */
struct GronwallAudit {
  bool ok = true;
  double worst_margin = 0;  // min over windows of bound - y(t+r)
  double t_worst = 0;
};

GronwallAudit gronwall_envelope_audit(const std::vector<double>& t,
                                      const std::vector<double>& y,
                                      const std::vector<double>& g,
                                      const std::vector<double>& h, double r);

// sup over t of the trapezoid integral of y over [t, t + width]; returns 0
// when the series is shorter than one window.
double sliding_window_sup(const std::vector<double>& t,
                          const std::vector<double>& y, double width);

// Energy monitor exponents for dimension n: (1,0), (1,1) and
// (floor(n/2), j) for j = 0..floor(n/2), deduplicated, ordered.
std::vector<std::pair<int, int>> energy_monitor_set(int n);

// One sampled line of a run's time series.  `energies` is aligned with the
// report's energy_set.  Residual slots hold NaN where undefined (first row,
// or the elliptic-limit residual when the signal equation is parabolic).
struct DiagnosticsRow {
  double t = 0.0;
  double dt = 0.0;
  double mass = 0.0;
  double mass_drift = 0.0;
  double sup_u = 0.0;
  double min_u = 0.0;
  double min_v = 0.0;
  double min_w = 0.0;
  double key_id_res = 0.0;
  double kid0_res = 0.0;
  double envelope_margin = 0.0;
  double comparison_margin = 0.0;
  std::vector<double> energies;
  double exp_moment = 0.0;
};

struct DiagnosticsReport {
  std::vector<std::pair<int, int>> energy_set;
  std::vector<DiagnosticsRow> rows;
  // smallest lattice pair (C, K) with v <= C*w + K over the whole run;
  // NaNs when no lattice pair fits
  double comparison_C = std::numeric_limits<double>::quiet_NaN();
  double comparison_K = std::numeric_limits<double>::quiet_NaN();
  GronwallAudit gronwall;      // audit of the lowest weighted energy
  double window_sup = 0.0;     // sup over unit windows of that energy
  double sup_ratio = 1.0;      // max_t ||u||_inf / ||u0||_inf
};

}  // namespace kslab
