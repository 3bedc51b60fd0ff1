#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kslab/diagnostics.hpp"
#include "kslab/grid.hpp"
#include "kslab/helmholtz.hpp"
#include "kslab/motility.hpp"

// Time integration for the cross-diffusion system
//
//   du/dt  = lap( gamma(v) * u )
//   eps dv/dt = lap(v) - v + u        (eps = 0: v solves (I - lap) v = u)
//
// with zero-flux boundaries on a box.  One step of size dt:
//
//   1. advance v:  eps = 0   -> v is slaved to u, nothing to do here;
//                  eps > 0   -> backward Euler, solved in increment form
//                               (eps/dt + 1 - lap) d = u - v + lap v,
//                               v' = v + d, so the solver tolerance acts on
//                               the small increment rather than on v itself.
//   2. advance u with gamma frozen at the current v:
//                  (1/gamma - dt lap) y = u,  u' = u + dt lap y.
//      The transform y = gamma(v) u' makes the system symmetric positive
//      definite; u' inherits exact conservation because it is u plus a
//      discrete divergence, and inherits positivity up to solver tolerance
//      because the matrix acting on y is an M-matrix.
//   3. eps = 0 only: refresh v = (I - lap)^{-1} u'.
//
// State invariant between steps when eps = 0: v == w == (I - lap)^{-1} u
// up to the elliptic solver tolerance.  When eps > 0, w is a lazy cache of
// (I - lap)^{-1} u refreshed on demand (refresh_w), not every step.

namespace kslab {

enum class RunStatus { finished, blowup_flagged, failed };
enum class BlowupVerdict { none, growth, threshold_exceeded };

std::string to_string(RunStatus s);
std::string to_string(BlowupVerdict b);

struct InitialData {
  enum class Kind { constant, gaussian, random_bumps, file };
  Kind kind = Kind::constant;
  double value = 1.0;            // constant level (kind == constant)
  double mass = 1.0;             // target integral; <= 0 keeps raw amplitude
  double width = 0.15;           // gaussian std dev (absolute length units)
  double floor = 0.0;            // additive background under the bumps
  std::vector<std::vector<double>> centers;  // empty: domain center
  int bumps = 3;                 // random_bumps count
  std::string path;              // field dump to load (kind == file)
};

struct TimeControls {
  double dt0 = 1e-4;
  double dt_min = 1e-9;
  double dt_max = 1e-2;
  double growth = 1.2;     // dt multiplier after a quiet stretch
  int grow_after = 10;     // accepted steps between growth attempts
  bool cfl_cap = false;    // optional dt <= 0.25 h^2 / max gamma(v)
};

struct SimConfig {
  int dim = 2;
  std::vector<int> extents{64, 64};
  std::vector<double> lengths{1.0, 1.0};
  double eps = 0.0;
  Motility motility = Motility::exponential(1.0);
  InitialData u0;
  InitialData v0;                 // ignored when eps == 0 (v is slaved)
  TimeControls time;
  double t_final = 1.0;
  long max_steps = 100000000;
  double m_blow = 1e12;           // sup-norm threshold for flagging blowup
  int growth_window = 16;         // trailing samples for the growth verdict
  double helmholtz_tol = 1e-10;   // relative residual for (I - lap) solves
  double update_tol = 1e-13;      // relative residual for the u update
  int diag_every = 10;            // steps between sampled rows
  int snapshot_every = 0;         // extra sample cadence for field dumps; 0 off
  double comparison_ctilde = 1.5;
  double comparison_K = 1.0;
  double exp_moment_A = 0.0;      // 0: auto 2*pi/mass in 2d, else off
  std::uint64_t seed = 1;

  SimConfig();
};

// Evolving state.  vstar tracks the running minimum of v over the whole
// history (the motility is evaluated at vstar for the envelope margin).
struct SimState {
  double t = 0.0;
  long step = 0;
  double dt_last = 0.0;
  Field u;
  Field v;
  Field w;
  double mass0 = 0.0;
  double u0_sup = 0.0;
  double vstar = 0.0;

  SimState(GridPtr g) : u(g), v(g), w(g) {}
};

class Stepper {
 public:
  explicit Stepper(const SimConfig& cfg);

  const GridPtr& grid() const { return grid_; }
  const HelmholtzSolver& helmholtz() const { return helm_; }
  const SimConfig& config() const { return cfg_; }

  // Builds and validates the initial state: u0 >= 0 with positive mass,
  // v0 > 0 when eps > 0.  For eps == 0 the state satisfies v = w = H[u].
  SimState make_initial_state() const;

  // Attempts one step of size dt.  On success the state advances and the
  // return is true; on rejection the state is untouched and last_rejection()
  // says why.  Rejection reasons: solver non-convergence, loss of
  // positivity beyond rounding (u below -1e-12 * u0_sup, or v <= 0),
  // non-finite values.
  bool try_step(SimState& s, double dt);

  // Recomputes w = (I - lap)^{-1} u (no-op at eps == 0 where w aliases v).
  void refresh_w(SimState& s) const;

  // dt bound from the optional diffusion cap: 0.25 h^2 / max gamma(v).
  double cfl_bound(const SimState& s) const;

  const std::string& last_rejection() const { return rejection_; }

 private:
  SimConfig cfg_;
  GridPtr grid_;
  HelmholtzSolver helm_;
  int max_iter_ = 0;
  std::string rejection_;
  // step workspaces; incr_ carries the previous signal increment as the next
  // warm start
  std::vector<double> gamma_, invdiag_, diag_lap_, rhs_, incr_, y_;
  Field u_new_, v_new_, lap_;

  void build_field(const InitialData& d, std::uint64_t seed, Field& f) const;
  bool update_u(const Field& u, const Field& v_for_gamma, double dt,
                Field& out);
};

struct RunResult {
  RunStatus status = RunStatus::finished;
  BlowupVerdict blowup = BlowupVerdict::none;
  DiagnosticsReport report;
  long accepted = 0;
  long rejected = 0;
  double wall_seconds = 0.0;
  double final_t = 0.0;
  double final_dt = 0.0;
  double final_mass = 0.0;
  double final_sup = 0.0;
  Field final_u;
  Field final_v;
  std::string failure;  // empty unless status == failed
};

// Called at every sampled row with the corresponding state (w freshly
// recomputed), so callers can write snapshots without rerunning anything.
using SampleSink = std::function<void(const DiagnosticsRow&, const SimState&)>;

// Runs the configured simulation with adaptive dt: reject-and-halve on any
// step failure, cautious regrowth after grow_after clean steps, hard stop
// when dt would fall below dt_min (status failed) or the sup norm crosses
// m_blow (status blowup_flagged).  Samples every diag_every accepted steps
// plus the initial and final states.
RunResult run_simulation(const SimConfig& cfg, const SampleSink& sink = {});

// Decision on a sampled sup-norm history: threshold_exceeded if the series
// ever reaches m_blow; growth if the trailing `window` samples are
// non-decreasing and gain at least a factor 10; none otherwise.
BlowupVerdict detect_blowup(const std::vector<double>& sup_history,
                            double m_blow, int window);

}  // namespace kslab
