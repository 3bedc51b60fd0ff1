// Acceptance gate.  One self-contained check per shipped guarantee; each
// prints a single [PASS] line with its headline numbers and wall time, and
// the first failing REQUIRE aborts with [FAIL] file:line.
//
//   acceptance          runs every criterion in order
//   acceptance 4 7      runs criteria 4 and 7 only
//
// Long experiments are cached, so criteria sharing a run (1/2/5) pay for it
// once.  Tuning constants for the desk-scale experiments sit right above
// their config builders; the grids, horizons, motilities, masses and
// tolerances the checks assert against are fixed here and not tunable.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kslab/diagnostics.hpp"
#include "kslab/grid.hpp"
#include "kslab/helmholtz.hpp"
#include "kslab/io.hpp"
#include "kslab/motility.hpp"
#include "kslab/stepper.hpp"

#define REQUIRE(cond)                                                        \
  do {                                                                       \
    if (!(cond)) {                                                           \
      std::fprintf(stderr, "[FAIL] %s:%d: %s\n", __FILE__, __LINE__, #cond); \
      std::exit(1);                                                          \
    }                                                                        \
  } while (0)

namespace {

using namespace kslab;

constexpr double kPi = std::numbers::pi;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

void note(const std::string& s) {
  std::fprintf(stderr, "  .. %s\n", s.c_str());
}

// ---------------------------------------------------------------------------
// run cache

struct RunRecord {
  std::string name;
  SimConfig cfg;
  RunResult rr;
  double w0_sup = 0.0;  // sup of the smoothed signal at t = 0
};

RunRecord record_run(std::string name, const SimConfig& cfg) {
  note("running " + name);
  RunRecord rec;
  rec.name = std::move(name);
  rec.cfg = cfg;
  double w0 = 0.0;
  rec.rr = run_simulation(cfg, [&](const DiagnosticsRow&, const SimState& s) {
    if (s.step == 0) w0 = max_value(s.w);
  });
  rec.w0_sup = w0;
  note(fmt("%s: status %s, %ld accepted, %.1fs", rec.name.c_str(),
           to_string(rec.rr.status).c_str(), rec.rr.accepted,
           rec.rr.wall_seconds));
  return rec;
}

// criterion 1/2: 64^2, both signal couplings, 1e4 accepted steps at fixed dt
SimConfig conservation_cfg(double eps) {
  SimConfig c;
  c.dim = 2;
  c.extents = {64, 64};
  c.lengths = {1.0, 1.0};
  c.eps = eps;
  c.motility = Motility::exponential(1.0);
  c.u0.kind = InitialData::Kind::gaussian;
  c.u0.mass = 1.0;
  c.u0.width = 0.15;
  c.v0.kind = InitialData::Kind::constant;
  c.v0.value = 1.0;
  c.time.dt0 = c.time.dt_min = c.time.dt_max = 1e-4;  // rejection = loud fail
  c.t_final = 10.0;      // generous; max_steps is the stop
  c.max_steps = 10000;
  c.helmholtz_tol = 1e-10;
  c.update_tol = 1e-13;
  c.diag_every = 10;
  return c;
}

// criterion 4: smooth elliptic-limit run, fixed dt, every step sampled
SimConfig keyid_cfg(double dt) {
  SimConfig c;
  c.dim = 2;
  c.extents = {16, 16};
  c.lengths = {1.0, 1.0};
  c.eps = 0.0;
  c.motility = Motility::exponential(1.0);
  c.u0.kind = InitialData::Kind::gaussian;
  c.u0.mass = 0.5;
  c.u0.width = 0.2;
  c.time.dt0 = c.time.dt_min = c.time.dt_max = dt;
  c.t_final = 0.1;
  c.helmholtz_tol = 1e-12;  // the residual agreement below rides on this
  c.update_tol = 1e-13;
  c.diag_every = 1;
  return c;
}

// criterion 8 tuning (grid, horizon, motility, and masses are asserted; the
// rest realizes the contrast at desk scale).  The constraint case eps = 0 is
// unusable here: no-flux walls give v the mean of u instantly, so for the
// supercritical mass gamma = e^{-v} <= e^{-20} everywhere and the run is
// frozen from the first step.  Fully parabolic with a near-zero signal the
// dynamics play out before the signal mean locks the motility.  The flat
// state at level m is linearly unstable exactly when m > pi^2 + 1 = 10.87,
// and the two pinned masses (10.05, 25.13) bracket that, so the verdicts are
// carried by the mass alone.  Bump and signal seed sit at a corner because a
// centered bump only excites the symmetric (stable) modes, and the sampling
// window spans the whole rise out of the initial spreading transient.
constexpr double kCritEps = 350.0;
constexpr double kCritSeedMass = 0.15;
constexpr double kCritSeedWidth = 0.25;
constexpr double kCritDtMax = 5e-3;
constexpr double kCritUpdateTol = 1e-11;
constexpr int kCritDiagEvery = 100;
constexpr int kCritGrowthWindow = 192;

SimConfig critical_cfg(double mass_multiplier, double width) {
  SimConfig c;
  c.dim = 2;
  c.extents = {96, 96};
  c.lengths = {1.0, 1.0};
  c.eps = kCritEps;
  c.motility = Motility::exponential(1.0);
  c.u0.kind = InitialData::Kind::gaussian;
  c.u0.mass = mass_multiplier * 4.0 * kPi;
  c.u0.width = width;
  c.u0.centers = {{0.05, 0.05}};
  c.v0.kind = InitialData::Kind::gaussian;
  c.v0.mass = kCritSeedMass;
  c.v0.width = kCritSeedWidth;
  c.v0.centers = {{0.05, 0.05}};
  c.v0.floor = 1e-3;
  c.t_final = 100.0;
  c.time.dt0 = 1e-4;
  c.time.dt_min = 1e-8;
  c.time.dt_max = kCritDtMax;
  c.helmholtz_tol = 1e-10;
  c.update_tol = kCritUpdateTol;
  c.diag_every = kCritDiagEvery;
  c.growth_window = kCritGrowthWindow;
  return c;
}

// criterion 9: 3d fully parabolic run in the integer-convexity regime
SimConfig energies_cfg() {
  SimConfig c;
  c.dim = 3;
  c.extents = {32, 32, 32};
  c.lengths = {1.0, 1.0, 1.0};
  c.eps = 1.0;
  c.motility = Motility::power(0.5);
  c.u0.kind = InitialData::Kind::gaussian;
  c.u0.mass = 2.0;
  c.u0.width = 0.2;
  c.v0.kind = InitialData::Kind::constant;
  c.v0.value = 1.0;
  c.t_final = 20.0;
  c.time.dt0 = 1e-4;
  c.time.dt_min = 1e-8;
  c.time.dt_max = 2e-3;
  c.helmholtz_tol = 1e-10;
  c.update_tol = 1e-12;
  c.diag_every = 20;
  return c;
}

// criterion 10 second subject: seeded bumps through the parabolic path
SimConfig bumps_cfg() {
  SimConfig c;
  c.dim = 2;
  c.extents = {32, 32};
  c.lengths = {1.0, 1.0};
  c.eps = 0.5;
  c.motility = Motility::exponential(1.0);
  c.u0.kind = InitialData::Kind::random_bumps;
  c.u0.bumps = 5;
  c.u0.mass = 1.5;
  c.u0.width = 0.08;
  c.u0.floor = 0.05;
  c.v0.kind = InitialData::Kind::constant;
  c.v0.value = 1.0;
  c.t_final = 0.05;
  c.time.dt0 = 1e-3;
  c.time.dt_min = 1e-6;
  c.time.dt_max = 5e-3;
  c.diag_every = 2;
  c.seed = 42;
  return c;
}

struct Lab {
  std::optional<std::vector<RunRecord>> conserve;  // eps 0, eps 1
  std::optional<std::vector<RunRecord>> keyid;     // dt 1e-3, 5e-4, 2.5e-4
  std::optional<RunRecord> crit_low, crit_high, bounded3d;

  const std::vector<RunRecord>& conservation_runs() {
    if (!conserve) {
      conserve.emplace();
      conserve->push_back(record_run("conservation eps=0", conservation_cfg(0.0)));
      conserve->push_back(record_run("conservation eps=1", conservation_cfg(1.0)));
    }
    return *conserve;
  }
  const std::vector<RunRecord>& keyid_runs() {
    if (!keyid) {
      keyid.emplace();
      for (double dt : {1e-3, 5e-4, 2.5e-4})
        keyid->push_back(record_run(fmt("identity dt=%g", dt), keyid_cfg(dt)));
    }
    return *keyid;
  }
  const RunRecord& subcritical_run() {
    if (!crit_low)
      crit_low = record_run("critical-mass 0.8", critical_cfg(0.8, 0.15));
    return *crit_low;
  }
  const RunRecord& supercritical_run() {
    if (!crit_high)
      crit_high = record_run("critical-mass 2.0", critical_cfg(2.0, 0.05));
    return *crit_high;
  }
  const RunRecord& bounded3d_run() {
    if (!bounded3d) bounded3d = record_run("3d energies", energies_cfg());
    return *bounded3d;
  }
};

// ---------------------------------------------------------------------------
// criterion 1: conservation

std::string c_conservation(Lab& lab) {
  std::string detail;
  for (const RunRecord& rec : lab.conservation_runs()) {
    REQUIRE(rec.rr.status == RunStatus::finished);
    REQUIRE(rec.rr.accepted == 10000);
    REQUIRE(rec.rr.rejected == 0);
    double worst = 0.0;
    for (const DiagnosticsRow& row : rec.rr.report.rows)
      worst = std::max(worst, std::fabs(row.mass_drift));
    REQUIRE(worst <= 1e-10);
    detail += fmt("%s|drift| %.1e (eps %g)", detail.empty() ? "max " : ", ",
                  worst, rec.cfg.eps);
  }
  return detail + " over 1e4 steps each";
}

// criterion 2: positivity and strict lower bounds on the same runs

std::string c_positivity(Lab& lab) {
  std::size_t rows = 0;
  double worst_u = 0.0;
  for (const RunRecord& rec : lab.conservation_runs()) {
    REQUIRE(!rec.rr.report.rows.empty());
    const double sup0 = rec.rr.report.rows.front().sup_u;
    REQUIRE(sup0 > 0.0);
    for (const DiagnosticsRow& row : rec.rr.report.rows) {
      REQUIRE(row.min_u >= -1e-12 * sup0);
      REQUIRE(row.min_v > 0.0);
      REQUIRE(row.min_w > 0.0);
      worst_u = std::min(worst_u, row.min_u / sup0);
      ++rows;
    }
  }
  return fmt("min u/sup u0 >= %.1e, min v and w > 0 at %zu samples", worst_u,
             rows);
}

// criterion 3: constraint solver accuracy

double eigen_error(int cells) {
  auto g = build_grid(2, {cells, cells}, {1.0, 1.0});
  Field f(g);
  fill_from(f, [](double x, double y, double) {
    return 1.0 + std::cos(kPi * x) * std::cos(kPi * y);
  });
  HelmholtzSolver solver(g, 1e-10);
  Field z = solver.solve(f);
  const double damp = 1.0 / (1.0 + 2.0 * kPi * kPi);
  double err = 0.0;
  std::size_t i = 0;
  for (int y = 0; y < cells; ++y)
    for (int x = 0; x < cells; ++x, ++i) {
      const double exact = 1.0 + damp * std::cos(kPi * g->center(0, x)) *
                                     std::cos(kPi * g->center(1, y));
      err = std::max(err, std::fabs(z.v[i] - exact));
    }
  return err;
}

// dense Gaussian elimination with partial pivoting; A row-major n x n
std::vector<double> dense_solve(std::vector<double> A, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::fabs(A[r * n + c]) > std::fabs(A[piv * n + c])) piv = r;
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(A[c * n + j], A[piv * n + j]);
      std::swap(b[c], b[piv]);
    }
    REQUIRE(A[c * n + c] != 0.0);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double m = A[r * n + c] / A[c * n + c];
      if (m == 0.0) continue;
      for (std::size_t j = c; j < n; ++j) A[r * n + j] -= m * A[c * n + j];
      b[r] -= m * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t j = r + 1; j < n; ++j) s -= A[r * n + j] * x[j];
    x[r] = s / A[r * n + r];
  }
  return x;
}

std::string c_helmholtz(Lab&) {
  const double e16 = eigen_error(16);
  const double e32 = eigen_error(32);
  const double e64 = eigen_error(64);
  REQUIRE(e16 > e32 && e32 > e64 && e64 > 0.0);
  const double o1 = std::log2(e16 / e32);
  const double o2 = std::log2(e32 / e64);
  REQUIRE(o1 >= 1.9);
  REQUIRE(o2 >= 1.9);

  auto g = build_grid(2, {8, 8}, {1.0, 1.0});
  HelmholtzSolver solver(g, 1e-12);
  const std::size_t n = g->ncell;
  std::vector<double> A(n * n);
  Field unit(g), col(g);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(unit.v.begin(), unit.v.end(), 0.0);
    unit.v[j] = 1.0;
    solver.apply(unit, col);
    for (std::size_t i = 0; i < n; ++i) A[i * n + j] = col.v[i];
  }
  Field f(g);
  fill_from(f, [](double x, double y, double) {
    return std::exp(x) * (1.0 + 0.5 * y) + x * x;
  });
  const std::vector<double> xd = dense_solve(A, f.v);
  Field z = solver.solve(f);
  double gap = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    gap = std::max(gap, std::fabs(z.v[i] - xd[i]));
  REQUIRE(gap <= 1e-10);
  return fmt("orders %.2f, %.2f; dense-inverse gap %.1e", o1, o2, gap);
}

// criterion 4: trajectory identity residual, first order in dt, and the
// elliptic-limit reduction agreeing with it to rounding

std::string c_keyid(Lab& lab) {
  const std::vector<RunRecord>& runs = lab.keyid_runs();
  REQUIRE(runs.size() == 3);
  double R[3] = {0, 0, 0};
  double worst_gap = 0.0;
  for (int i = 0; i < 3; ++i) {
    const RunRecord& rec = runs[i];
    REQUIRE(rec.rr.status == RunStatus::finished);
    REQUIRE(rec.rr.rejected == 0);
    std::size_t counted = 0;
    for (const DiagnosticsRow& row : rec.rr.report.rows) {
      if (std::isnan(row.key_id_res)) continue;
      REQUIRE(!std::isnan(row.kid0_res));
      R[i] = std::max(R[i], row.key_id_res);
      const double gap = std::fabs(row.key_id_res - row.kid0_res);
      REQUIRE(gap <= 1e-12);
      worst_gap = std::max(worst_gap, gap);
      ++counted;
    }
    REQUIRE(counted >= 50);
  }
  REQUIRE(R[0] > R[1] && R[1] > R[2] && R[2] > 0.0);
  const double o1 = std::log2(R[0] / R[1]);
  const double o2 = std::log2(R[1] / R[2]);
  REQUIRE(o1 >= 0.9);
  REQUIRE(o2 >= 0.9);
  return fmt("defect %.2e/%.2e/%.2e, orders %.2f, %.2f; |key-kid0| <= %.1e",
             R[0], R[1], R[2], o1, o2, worst_gap);
}

// criterion 5: decay envelope margin on every bounded-regime run

std::string c_envelope(Lab& lab) {
  std::vector<const RunRecord*> runs;
  for (const RunRecord& r : lab.conservation_runs()) runs.push_back(&r);
  for (const RunRecord& r : lab.keyid_runs()) runs.push_back(&r);
  runs.push_back(&lab.subcritical_run());
  runs.push_back(&lab.bounded3d_run());

  double worst = 0.0;
  for (const RunRecord* rec : runs) {
    REQUIRE(!rec->rr.report.rows.empty());
    const double mass0 = rec->rr.report.rows.front().mass;
    const RegimeVerdict rv =
        classify_regime(rec->cfg.dim, rec->cfg.eps, rec->cfg.motility, mass0);
    REQUIRE(rv.regime == Regime::uniformly_bounded);
    REQUIRE(rec->w0_sup > 0.0);
    for (const DiagnosticsRow& row : rec->rr.report.rows) {
      REQUIRE(row.envelope_margin >= -1e-8 * rec->w0_sup);
      worst = std::min(worst, row.envelope_margin / rec->w0_sup);
    }
  }
  return fmt("margin/sup w0 >= %.1e across %zu bounded runs", worst,
             runs.size());
}

// criterion 6: regime table exactness, boundaries included

std::string c_classifier(Lab&) {
  struct Case {
    int n;
    double eps;
    Motility m;
    double mass;
    Regime regime;
    const char* rule;
  };
  // thresholds written with the same arithmetic the classifier uses, so
  // boundary cases compare bitwise
  auto k_strict = [](int n) { return (std::sqrt(2.0 * n) + 2.0) / (n - 2.0); };
  auto k_half = [](int n) { return 2.0 / (n - 2.0); };
  auto k_int = [](int n) { return 1.0 / std::floor(n / 2.0); };
  auto mc = [](double chi) { return 4.0 * kPi / chi; };

  const char* r2_any = "2d.decay-slower-than-any-exponential";
  const char* r2_sub = "2d.subcritical-mass";
  const char* r2_super = "2d.exponential-motility-supercritical-mass";
  const char* r2_at = "2d.at-or-above-critical-mass-without-blowup-rule";
  const char* r2_none = "2d.no-decay-clause-applies";
  const char* r1 = "1d.not-covered";
  const char* re_half = "nd.elliptic.decay-and-convexity-above-half-n";
  const char* re_strict = "nd.elliptic.strict-convexity-existence";
  const char* re_none = "nd.elliptic.no-convexity-clause";
  const char* rp_int = "nd.parabolic.decay-and-integer-convexity";
  const char* rp_none = "nd.parabolic.no-convexity-clause";

  const Regime B = Regime::uniformly_bounded;
  const Regime O = Regime::global_existence_boundedness_open;
  const Regime X = Regime::blowup_possible;
  const Regime T = Regime::outside_theory;

  const std::vector<Case> cases = {
      // 2d, decay slower than any exponential: mass never matters
      {2, 0.0, Motility::power(1.0), 1.0, B, r2_any},
      {2, 0.0, Motility::power(0.5), 500.0, B, r2_any},
      {2, 1.0, Motility::power(2.0), 50.0, B, r2_any},
      {2, 0.0, Motility::power_log(1.0), 100.0, B, r2_any},
      {2, 0.0, Motility::power_log(0.3), 1e6, B, r2_any},
      {2, 0.0, Motility::stretched_exponential(1.0, 0.5), 300.0, B, r2_any},
      // 2d, exponential decay rate: critical mass 4 pi / chi
      {2, 0.0, Motility::exponential(1.0), mc(1.0) * (1.0 - 1e-6), B, r2_sub},
      {2, 0.0, Motility::exponential(1.0), mc(1.0) * (1.0 + 1e-6), X, r2_super},
      {2, 0.0, Motility::exponential(1.0), mc(1.0), T, r2_at},
      {2, 0.0, Motility::exponential(2.0), mc(2.0) * (1.0 - 1e-6), B, r2_sub},
      {2, 0.0, Motility::exponential(2.0), mc(2.0) * (1.0 + 1e-6), X, r2_super},
      {2, 0.0, Motility::exponential(0.5), mc(0.5) * (1.0 + 1e-6), X, r2_super},
      {2, 1.0, Motility::exponential(1.0), 1.0, B, r2_sub},
      {2, 1.0, Motility::exponential(1.0), mc(1.0) * (1.0 + 1e-6), X, r2_super},
      // stretched tail at beta = 1 has the exponential rate but not the
      // exponential blowup statement
      {2, 0.0, Motility::stretched_exponential(2.0, 1.0), mc(2.0) * (1.0 - 1e-6),
       B, r2_sub},
      {2, 0.0, Motility::stretched_exponential(2.0, 1.0), mc(2.0) * (1.0 + 1e-6),
       T, r2_at},
      // 2d, decays faster than every exponential
      {2, 0.0, Motility::stretched_exponential(1.0, 2.0), 1.0, T, r2_none},
      {2, 0.0, Motility::stretched_exponential(3.0, 1.5), 10.0, T, r2_none},
      // 1d
      {1, 0.0, Motility::exponential(1.0), 1.0, T, r1},
      {1, 1.0, Motility::power(1.0), 5.0, T, r1},
      // n = 3, elliptic signal
      {3, 0.0, Motility::power(0.5), 10.0, B, re_half},
      {3, 0.0, Motility::power(1.99), 10.0, B, re_half},
      {3, 0.0, Motility::power(k_half(3)), 10.0, O, re_strict},
      {3, 0.0, Motility::power(4.0), 10.0, O, re_strict},
      {3, 0.0, Motility::power(k_strict(3)), 10.0, T, re_none},
      {3, 0.0, Motility::power(5.0), 10.0, T, re_none},
      {3, 0.0, Motility::exponential(1.0), 10.0, T, re_none},
      // n = 3, parabolic signal
      {3, 1.0, Motility::power(0.5), 10.0, B, rp_int},
      {3, 1.0, Motility::power(k_int(3)), 10.0, B, rp_int},
      {3, 2.5, Motility::power(1.0000001), 10.0, T, rp_none},
      {3, 1.0, Motility::exponential(2.0), 10.0, T, rp_none},
      // n = 4
      {4, 0.0, Motility::power(0.5), 10.0, B, re_half},
      {4, 0.0, Motility::power(k_half(4)), 10.0, O, re_strict},
      {4, 0.0, Motility::power(k_strict(4)), 10.0, T, re_none},
      {4, 1.0, Motility::power(k_int(4)), 10.0, B, rp_int},
      {4, 1.0, Motility::power(0.5000001), 10.0, T, rp_none},
      // n = 5
      {5, 0.0, Motility::power(0.6), 10.0, B, re_half},
      {5, 0.0, Motility::power(k_half(5)), 10.0, O, re_strict},
      {5, 1.0, Motility::power(k_int(5)), 10.0, B, rp_int},
      // n = 6
      {6, 0.0, Motility::power(0.4), 10.0, B, re_half},
      {6, 0.0, Motility::power(k_half(6)), 10.0, O, re_strict},
      {6, 1.0, Motility::power(k_int(6)), 10.0, B, rp_int},
      {6, 1.0, Motility::power(0.34), 10.0, T, rp_none},
  };

  REQUIRE(cases.size() >= 40);
  for (const Case& c : cases) {
    const RegimeVerdict v = classify_regime(c.n, c.eps, c.m, c.mass);
    REQUIRE(v.regime == c.regime);
    REQUIRE(v.rule == std::string(c.rule));
  }
  return fmt("%zu/%zu cases match, boundaries bitwise", cases.size(),
             cases.size());
}

// criterion 7: exponent ladder arithmetic

std::string c_ladder(Lab&) {
  auto close = [](double a, double b) {
    return std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(b));
  };
  int pairs = 0;
  for (int n : {3, 4, 5, 6}) {
    const double kmax = 2.0 / (n - 2.0);
    const double qstar = 2.0 * n / (n - 2.0);
    for (int j = 0; j < 10; ++j) {
      const double k = kmax * (j + 0.5) / 10.0;
      const MoserLadder lad = moser_ladder(n, k, 20);
      REQUIRE(lad.p.size() == 21);
      REQUIRE(close(lad.qstar, qstar));
      REQUIRE(close(lad.normalizer, 2.0 / (qstar - n * k)));
      double rec = qstar / 2.0;
      for (int r = 0; r <= 20; ++r) {
        const double closed = std::ldexp(qstar - n * k, r - 1) + n * k / 2.0;
        REQUIRE(close(rec, closed));
        REQUIRE(close(lad.p[r], rec));
        REQUIRE(close(lad.p[r], closed));
        if (r > 0) REQUIRE(lad.p[r] > lad.p[r - 1]);
        rec = 2.0 * rec - n * k / 2.0;
      }
      // interpolation exponent and its four invariants on ladder pairs
      const double targets[4] = {2.0, 2.0 / (n + 2.0), n / 2.0, (n + 2.0) / 2.0};
      for (int r = 0; r < 6; ++r) {
        const double q = lad.p[r];
        const double p = 2.0 * q - n * k / 2.0;
        const MoserAlpha ma = moser_alpha(p, q, k, n);
        REQUIRE(ma.alpha > 0.0 && ma.alpha < 1.0);
        for (int t = 0; t < 4; ++t) REQUIRE(close(ma.ratios[t], targets[t]));
        ++pairs;
      }
    }
  }
  // binomial rows, exact in floating point up to p = 12
  for (int p = 0; p <= 12; ++p) {
    const std::vector<double> lam = lambda_weights(p);
    REQUIRE(lam.size() == static_cast<std::size_t>(p) + 1);
    long long c = 1;
    for (int j = 0; j <= p; ++j) {
      REQUIRE(lam[j] == static_cast<double>(c));
      c = c * (p - j) / (j + 1);
    }
  }
  return fmt("4 dims x 10 exponents x 21 rungs to 1e-12; %d lift pairs; "
             "13 binomial rows exact",
             pairs);
}

// criterion 8: critical-mass experiment at desk scale

std::string c_critical(Lab& lab) {
  const RunRecord& low = lab.subcritical_run();
  REQUIRE(low.rr.status == RunStatus::finished);
  REQUIRE(low.rr.blowup == BlowupVerdict::none);
  REQUIRE(low.rr.report.sup_ratio <= 5.0);

  const RunRecord& high = lab.supercritical_run();
  REQUIRE(high.rr.status == RunStatus::finished);
  REQUIRE(high.rr.blowup == BlowupVerdict::growth);
  const auto& rows = high.rr.report.rows;
  REQUIRE(static_cast<int>(rows.size()) >= kCritGrowthWindow);
  const double window_first = rows[rows.size() - kCritGrowthWindow].sup_u;
  REQUIRE(window_first > 0.0);
  return fmt("subcritical ratio %.2f <= 5, verdict none; supercritical sup "
             "rises x%.1f across the verdict window (indicator only)",
             low.rr.report.sup_ratio, rows.back().sup_u / window_first);
}

// criterion 9: weighted energies in the bounded 3d regime

std::string c_energies(Lab& lab) {
  const RunRecord& rec = lab.bounded3d_run();
  REQUIRE(rec.rr.status == RunStatus::finished);
  const DiagnosticsReport& rep = rec.rr.report;
  REQUIRE(rep.energy_set.size() == 2);
  REQUIRE(rep.energy_set[0] == std::make_pair(1, 0));
  REQUIRE(rep.energy_set[1] == std::make_pair(1, 1));

  const double t_cut = 0.1 * rec.cfg.t_final;  // initial transient
  double worst_ratio = 1.0;
  for (std::size_t col = 0; col < rep.energy_set.size(); ++col) {
    std::vector<double> sorted;
    for (const DiagnosticsRow& row : rep.rows) {
      if (row.t < t_cut) continue;
      const double e = row.energies[col];
      REQUIRE(std::isfinite(e) && e > 0.0);
      sorted.insert(std::upper_bound(sorted.begin(), sorted.end(), e), e);
      const std::size_t m = sorted.size();
      const double med = (m % 2) ? sorted[m / 2]
                                 : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
      REQUIRE(e <= 3.0 * med);
      REQUIRE(e >= med / 3.0);
      worst_ratio = std::max(worst_ratio, std::max(e / med, med / e));
    }
    REQUIRE(sorted.size() >= 50);
  }

  // sliding unit-window integrals: finite, and the late half not above the
  // early half (no upward trend)
  REQUIRE(std::isfinite(rep.window_sup) && rep.window_sup > 0.0);
  std::vector<double> t;
  for (const DiagnosticsRow& row : rep.rows)
    if (row.t >= t_cut) t.push_back(row.t);
  const double t_mid = 0.5 * (t.front() + t.back());
  for (std::size_t col = 0; col < rep.energy_set.size(); ++col) {
    std::vector<double> t1, y1, t2, y2;
    for (const DiagnosticsRow& row : rep.rows) {
      if (row.t < t_cut) continue;
      if (row.t <= t_mid) {
        t1.push_back(row.t);
        y1.push_back(row.energies[col]);
      } else {
        t2.push_back(row.t);
        y2.push_back(row.energies[col]);
      }
    }
    const double s1 = sliding_window_sup(t1, y1, 1.0);
    const double s2 = sliding_window_sup(t2, y2, 1.0);
    REQUIRE(s1 > 0.0 && s2 > 0.0);
    REQUIRE(s2 <= 1.5 * s1);
  }
  return fmt("energies hug running median (worst ratio %.2f <= 3); window "
             "sup %.3g, late/early not trending up",
             worst_ratio, rep.window_sup);
}

// criterion 10: byte-identical reruns

std::string c_determinism(Lab&) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "kslab_acceptance";
  fs::create_directories(dir);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };

  std::size_t bytes = 0;
  int subjects = 0;
  for (const SimConfig& cfg : {keyid_cfg(1e-3), bumps_cfg()}) {
    const fs::path a = dir / fmt("rerun_%d_a.csv", subjects);
    const fs::path b = dir / fmt("rerun_%d_b.csv", subjects);
    const RunResult r1 = run_simulation(cfg);
    const RunResult r2 = run_simulation(cfg);
    REQUIRE(r1.status == RunStatus::finished);
    REQUIRE(r2.status == RunStatus::finished);
    write_timeseries_csv(a.string(), r1.report);
    write_timeseries_csv(b.string(), r2.report);
    const std::string sa = slurp(a);
    const std::string sb = slurp(b);
    REQUIRE(!sa.empty());
    REQUIRE(sa == sb);
    REQUIRE(r1.final_u.v == r2.final_u.v);
    REQUIRE(r1.final_v.v == r2.final_v.v);
    bytes += sa.size();
    ++subjects;
  }
  return fmt("%d configs rerun, CSV byte-identical (%zu bytes), final fields "
             "bitwise equal",
             subjects, bytes);
}

}  // namespace

int main(int argc, char** argv) {
  struct Entry {
    int id;
    const char* name;
    std::string (*fn)(Lab&);
  };
  const Entry entries[] = {
      {1, "conservation", c_conservation}, {2, "positivity", c_positivity},
      {3, "constraint-solver", c_helmholtz}, {4, "trajectory-identity", c_keyid},
      {5, "decay-envelope", c_envelope},   {6, "regime-table", c_classifier},
      {7, "exponent-ladder", c_ladder},    {8, "critical-mass", c_critical},
      {9, "weighted-energies", c_energies}, {10, "determinism", c_determinism},
  };

  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) {
    char* end = nullptr;
    const long id = std::strtol(argv[i], &end, 10);
    if (end == argv[i] || *end != '\0' || id < 1 || id > 10) {
      std::fprintf(stderr, "usage: %s [criterion 1..10]...\n", argv[0]);
      return 2;
    }
    wanted.push_back(static_cast<int>(id));
  }

  Lab lab;
  for (const Entry& e : entries) {
    if (!wanted.empty() &&
        std::find(wanted.begin(), wanted.end(), e.id) == wanted.end())
      continue;
    const auto start = std::chrono::steady_clock::now();
    const std::string detail = e.fn(lab);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("[PASS] %2d %-19s %s  [%.1fs]\n", e.id, e.name, detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  return 0;
}
