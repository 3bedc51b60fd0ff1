#include "kslab/stepper.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <iterator>
#include <limits>
#include <random>
#include <stdexcept>

#include "kslab/detail/pcg.hpp"
#include "kslab/io.hpp"

namespace kslab {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::finished: return "finished";
    case RunStatus::blowup_flagged: return "blowup-flagged";
    case RunStatus::failed: return "failed";
  }
  return "?";
}

std::string to_string(BlowupVerdict b) {
  switch (b) {
    case BlowupVerdict::none: return "none";
    case BlowupVerdict::growth: return "growth";
    case BlowupVerdict::threshold_exceeded: return "threshold-exceeded";
  }
  return "?";
}

SimConfig::SimConfig() {
  u0.kind = InitialData::Kind::gaussian;
  u0.mass = 1.0;
  u0.width = 0.15;
  v0.kind = InitialData::Kind::constant;
  v0.value = 1.0;
}

Stepper::Stepper(const SimConfig& cfg)
    : cfg_(cfg),
      grid_(build_grid(cfg.dim, cfg.extents, cfg.lengths)),
      helm_(grid_, cfg.helmholtz_tol),
      gamma_(grid_->ncell),
      invdiag_(grid_->ncell),
      diag_lap_(grid_->ncell),
      rhs_(grid_->ncell),
      y_(grid_->ncell, 0.0),
      u_new_(grid_),
      v_new_(grid_),
      lap_(grid_) {
  if (!(cfg.eps >= 0.0) || !std::isfinite(cfg.eps))
    throw std::invalid_argument("eps must be finite and nonnegative");
  const TimeControls& tc = cfg.time;
  if (!(tc.dt0 > 0.0) || !(tc.dt_min > 0.0) || !(tc.dt_max >= tc.dt_min))
    throw std::invalid_argument("time controls need 0 < dt_min <= dt_max and dt0 > 0");
  if (!(tc.growth >= 1.0) || tc.grow_after < 1)
    throw std::invalid_argument("dt growth controls out of range");
  if (!(cfg.t_final >= 0.0))
    throw std::invalid_argument("t_final must be nonnegative");

  int longest = 0;
  for (int a = 0; a < grid_->dim; ++a) longest = std::max(longest, grid_->extent[a]);
  max_iter_ = 200 + 40 * longest;

  // diagonal of -lap: (interior neighbor count) / h^2 per axis
  const Grid& g = *grid_;
  std::size_t i = 0;
  for (int z = 0; z < g.extent[2]; ++z)
    for (int y = 0; y < g.extent[1]; ++y)
      for (int x = 0; x < g.extent[0]; ++x, ++i) {
        double d = ((x > 0) + (x < g.extent[0] - 1)) / (g.h[0] * g.h[0]);
        if (g.dim > 1) d += ((y > 0) + (y < g.extent[1] - 1)) / (g.h[1] * g.h[1]);
        if (g.dim > 2) d += ((z > 0) + (z < g.extent[2] - 1)) / (g.h[2] * g.h[2]);
        diag_lap_[i] = d;
      }
}

void Stepper::build_field(const InitialData& d, std::uint64_t seed,
                          Field& f) const {
  const Grid& g = *grid_;
  if (f.grid != grid_) f = Field(grid_);

  switch (d.kind) {
    case InitialData::Kind::constant: {
      std::fill(f.v.begin(), f.v.end(), d.value);
      return;  // no mass rescale for plain levels
    }
    case InitialData::Kind::gaussian: {
      std::vector<std::vector<double>> centers = d.centers;
      if (centers.empty()) {
        std::vector<double> c(g.dim);
        for (int a = 0; a < g.dim; ++a) c[a] = 0.5 * g.length[a];
        centers.push_back(c);
      }
      for (const auto& c : centers)
        if (static_cast<int>(c.size()) != g.dim)
          throw std::invalid_argument("bump center needs one coordinate per axis");
      if (!(d.width > 0.0))
        throw std::invalid_argument("bump width must be positive");
      const double is2 = 1.0 / (2.0 * d.width * d.width);
      fill_from(f, [&](double x, double y, double z) {
        const double p[3] = {x, y, z};
        double s = d.floor;
        for (const auto& c : centers) {
          double r2 = 0.0;
          for (int a = 0; a < g.dim; ++a) r2 += (p[a] - c[a]) * (p[a] - c[a]);
          s += std::exp(-r2 * is2);
        }
        return s;
      });
      break;
    }
    case InitialData::Kind::random_bumps: {
      if (d.bumps < 1) throw std::invalid_argument("need at least one bump");
      if (!(d.width > 0.0))
        throw std::invalid_argument("bump width must be positive");
      std::mt19937_64 gen(seed);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      struct Bump {
        double c[3], amp, is2;
      };
      std::vector<Bump> bumps(d.bumps);
      for (auto& b : bumps) {
        for (int a = 0; a < g.dim; ++a) b.c[a] = unit(gen) * g.length[a];
        const double w = d.width * (0.5 + unit(gen));
        b.is2 = 1.0 / (2.0 * w * w);
        b.amp = 0.5 + unit(gen);
      }
      fill_from(f, [&](double x, double y, double z) {
        const double p[3] = {x, y, z};
        double s = d.floor;
        for (const auto& b : bumps) {
          double r2 = 0.0;
          for (int a = 0; a < g.dim; ++a) r2 += (p[a] - b.c[a]) * (p[a] - b.c[a]);
          s += b.amp * std::exp(-r2 * b.is2);
        }
        return s;
      });
      break;
    }
    case InitialData::Kind::file: {
      FieldDump dump = read_field_dump(d.path);
      const Grid& dg = *dump.field.grid;
      bool same = dg.dim == g.dim;
      for (int a = 0; same && a < g.dim; ++a)
        same = dg.extent[a] == g.extent[a] &&
               std::fabs(dg.length[a] - g.length[a]) <= 1e-12 * g.length[a];
      if (!same)
        throw std::invalid_argument("field dump grid does not match the run grid: " +
                                    d.path);
      f.v = dump.field.v;
      return;
    }
  }

  if (d.mass > 0.0) {
    const double m = integrate(f);
    if (!(m > 0.0))
      throw std::invalid_argument("initial field carries no mass to rescale");
    const double scale = d.mass / m;
    for (double& x : f.v) x *= scale;
  }
}

SimState Stepper::make_initial_state() const {
  SimState s(grid_);
  build_field(cfg_.u0, cfg_.seed, s.u);
  if (min_value(s.u) < 0.0)
    throw std::invalid_argument("initial density has negative cells");
  s.mass0 = integrate(s.u);
  if (!(s.mass0 > 0.0))
    throw std::invalid_argument("initial density must carry positive mass");
  s.u0_sup = max_value(s.u);

  if (cfg_.eps == 0.0) {
    s.v = helm_.solve(s.u);
    s.w.v = s.v.v;
  } else {
    build_field(cfg_.v0, cfg_.seed + 1, s.v);
    if (!(min_value(s.v) > 0.0))
      throw std::invalid_argument("initial signal must be strictly positive");
    s.w = helm_.solve(s.u);
  }
  s.vstar = min_value(s.v);
  return s;
}

bool Stepper::update_u(const Field& u, const Field& vg, double dt, Field& out) {
  const std::size_t n = grid_->ncell;
  try {
    for (std::size_t i = 0; i < n; ++i) {
      const double g = cfg_.motility(vg.v[i]);
      if (!(g > 0.0) || !std::isfinite(g) || g < 1e-300) {
        rejection_ = "motility not positive at the current signal";
        return false;
      }
      gamma_[i] = g;
      invdiag_[i] = 1.0 / (1.0 / g + dt * diag_lap_[i]);
    }
  } catch (const std::exception& e) {
    rejection_ = std::string("motility evaluation failed: ") + e.what();
    return false;
  }

  auto apply = [&](const std::vector<double>& x, std::vector<double>& ax) {
    laplacian_neumann(*grid_, x.data(), ax.data());
    for (std::size_t i = 0; i < n; ++i) ax[i] = x[i] / gamma_[i] - dt * ax[i];
  };

  // y solves (1/gamma - dt lap) y = u, so y = gamma(v) u' exactly; start
  // from the zeroth-order guess y = gamma u
  for (std::size_t i = 0; i < n; ++i) y_[i] = gamma_[i] * u.v[i];
  const auto res =
      detail::pcg(apply, invdiag_, u.v, y_, cfg_.update_tol, max_iter_);
  if (!res.converged) {
    rejection_ = "density update solve stalled (relative residual " +
                 std::to_string(res.rel_residual) + ")";
    return false;
  }

  if (out.grid != grid_) out = Field(grid_);
  laplacian_neumann(*grid_, y_.data(), out.v.data());
  for (std::size_t i = 0; i < n; ++i) out.v[i] = u.v[i] + dt * out.v[i];
  return true;
}

bool Stepper::try_step(SimState& s, double dt) {
  rejection_.clear();
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    rejection_ = "step size must be positive and finite";
    return false;
  }
  const std::size_t n = grid_->ncell;
  const Field* v_for_gamma = &s.v;

  if (cfg_.eps > 0.0) {
    // (eps/dt + 1 - lap) d = u - v + lap v, v' = v + d.  Solving for the
    // increment keeps the tolerance acting on d, which matters when eps/dt
    // dwarfs everything else.
    laplacian_neumann(s.v, lap_);
    const double shift = cfg_.eps / dt + 1.0;
    for (std::size_t i = 0; i < n; ++i)
      rhs_[i] = s.u.v[i] - s.v.v[i] + lap_.v[i];
    auto apply = [&](const std::vector<double>& x, std::vector<double>& ax) {
      laplacian_neumann(*grid_, x.data(), ax.data());
      for (std::size_t i = 0; i < n; ++i) ax[i] = shift * x[i] - ax[i];
    };
    for (std::size_t i = 0; i < n; ++i)
      invdiag_[i] = 1.0 / (shift + diag_lap_[i]);
    if (incr_.size() != n) incr_.assign(n, 0.0);
    const auto res = detail::pcg(apply, invdiag_, rhs_, incr_,
                                 cfg_.helmholtz_tol, max_iter_);
    if (!res.converged) {
      rejection_ = "signal update solve stalled (relative residual " +
                   std::to_string(res.rel_residual) + ")";
      return false;
    }
    double vmin = std::numeric_limits<double>::infinity();
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = s.v.v[i] + incr_[i];
      v_new_.v[i] = x;
      finite = finite && std::isfinite(x);
      vmin = std::min(vmin, x);
    }
    if (!finite) {
      rejection_ = "signal update produced non-finite values";
      return false;
    }
    if (!(vmin > 0.0)) {
      rejection_ = "signal positivity lost";
      return false;
    }
    v_for_gamma = &v_new_;
  }

  if (!update_u(s.u, *v_for_gamma, dt, u_new_)) return false;

  double umin = std::numeric_limits<double>::infinity();
  bool finite = true;
  for (double x : u_new_.v) {
    finite = finite && std::isfinite(x);
    umin = std::min(umin, x);
  }
  if (!finite) {
    rejection_ = "density update produced non-finite values";
    return false;
  }
  if (umin < -1e-12 * s.u0_sup) {
    rejection_ = "density positivity lost beyond rounding";
    return false;
  }

  if (cfg_.eps == 0.0) {
    try {
      v_new_ = helm_.solve(u_new_, s.v, nullptr);
    } catch (const SolverFailure& e) {
      rejection_ = std::string("signal constraint solve stalled: ") + e.what();
      return false;
    }
    if (!(min_value(v_new_) > 0.0)) {
      rejection_ = "signal positivity lost";
      return false;
    }
  }

  s.u.v.swap(u_new_.v);
  s.v.v.swap(v_new_.v);
  if (cfg_.eps == 0.0) s.w.v = s.v.v;
  s.t += dt;
  s.step += 1;
  s.dt_last = dt;
  s.vstar = std::min(s.vstar, min_value(s.v));
  return true;
}

void Stepper::refresh_w(SimState& s) const {
  if (cfg_.eps == 0.0) {
    s.w.v = s.v.v;
    return;
  }
  s.w = helm_.solve(s.u, s.w, nullptr);
}

double Stepper::cfl_bound(const SimState& s) const {
  if (!cfg_.time.cfl_cap) return std::numeric_limits<double>::infinity();
  double gmax = 0.0;
  for (double x : s.v.v) gmax = std::max(gmax, cfg_.motility(x));
  double hmin = std::numeric_limits<double>::infinity();
  for (int a = 0; a < grid_->dim; ++a) hmin = std::min(hmin, grid_->h[a]);
  return gmax > 0.0 ? 0.25 * hmin * hmin / gmax
                    : std::numeric_limits<double>::infinity();
}

BlowupVerdict detect_blowup(const std::vector<double>& sup_history,
                            double m_blow, int window) {
  for (double x : sup_history)
    if (x >= m_blow) return BlowupVerdict::threshold_exceeded;
  if (window < 2 || static_cast<int>(sup_history.size()) < window)
    return BlowupVerdict::none;
  const std::size_t start = sup_history.size() - window;
  for (std::size_t i = start; i + 1 < sup_history.size(); ++i)
    if (sup_history[i + 1] < sup_history[i]) return BlowupVerdict::none;
  const double first = sup_history[start];
  if (first > 0.0 && sup_history.back() >= 10.0 * first)
    return BlowupVerdict::growth;
  return BlowupVerdict::none;
}

RunResult run_simulation(const SimConfig& cfg, const SampleSink& sink) {
  const auto wall0 = std::chrono::steady_clock::now();
  Stepper st(cfg);
  SimState s = st.make_initial_state();

  RunResult out;
  DiagnosticsReport& rep = out.report;
  rep.energy_set = energy_monitor_set(cfg.dim);

  const double expA =
      cfg.exp_moment_A > 0.0
          ? cfg.exp_moment_A
          : (cfg.dim == 2 ? 2.0 * kPi / s.mass0 : 0.0);

  const Field w0 = s.w;
  Field u_prev = s.u, v_prev = s.v;
  Field w_prev(st.grid());
  bool prev_valid = false;

  // running deviation max_t max_x (v / C - w) per comparison scale
  static const double kCs[] = {1.01, 1.02, 1.05, 1.1, 1.25, 1.5, 2.0, 3.0, 5.0};
  static const double kKs[] = {0.01, 0.02, 0.05, 0.1, 0.2,
                               0.5,  1.0,  2.0,  5.0, 10.0};
  std::array<double, std::size(kCs)> lattice_dev;
  lattice_dev.fill(-std::numeric_limits<double>::infinity());

  std::vector<double> sup_series;

  auto sample = [&]() {
    DiagnosticsRow row;
    row.t = s.t;
    row.dt = s.dt_last;
    row.mass = integrate(s.u);
    row.mass_drift = (row.mass - s.mass0) / s.mass0;
    row.sup_u = max_value(s.u);
    row.min_u = min_value(s.u);

    if (prev_valid && cfg.eps > 0.0)
      w_prev = st.helmholtz().solve(u_prev, s.w, nullptr);
    st.refresh_w(s);
    row.min_v = min_value(s.v);
    row.min_w = min_value(s.w);

    if (prev_valid) {
      const Field& wp = cfg.eps == 0.0 ? v_prev : w_prev;
      row.key_id_res = key_identity_residual(cfg.motility, st.helmholtz(), wp,
                                             s.w, s.v, s.u, s.dt_last);
      row.kid0_res = cfg.eps == 0.0
                         ? kid0_residual(cfg.motility, st.helmholtz(), v_prev,
                                         s.v, s.u, s.dt_last, 0.0)
                         : kNaN;
    } else {
      row.key_id_res = kNaN;
      row.kid0_res = kNaN;
    }

    row.envelope_margin =
        envelope_margin(s.w, w0, s.t, cfg.motility(s.vstar));
    row.comparison_margin = comparison_margin(
        s.v, s.w, cfg.comparison_ctilde, cfg.comparison_K);

    row.energies.reserve(rep.energy_set.size());
    for (const auto& [p, q] : rep.energy_set)
      row.energies.push_back(weighted_energy(s.u, s.v, p, q, cfg.motility));

    row.exp_moment = expA > 0.0 ? exp_moment(s.w, expA) : kNaN;

    for (std::size_t c = 0; c < std::size(kCs); ++c) {
      double dev = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < s.u.size(); ++i)
        dev = std::max(dev, s.v.v[i] / kCs[c] - s.w.v[i]);
      lattice_dev[c] = std::max(lattice_dev[c], dev);
    }

    rep.rows.push_back(row);
    if (sink) sink(rep.rows.back(), s);
  };

  sample();  // t = 0
  sup_series.push_back(rep.rows.back().sup_u);

  double dt = std::clamp(cfg.time.dt0, cfg.time.dt_min, cfg.time.dt_max);
  int streak = 0;
  bool threshold_hit = false;

  while (s.t < cfg.t_final * (1.0 - 1e-12) && s.step < cfg.max_steps) {
    double dt_try = std::min(dt, cfg.t_final - s.t);
    dt_try = std::min(dt_try, st.cfl_bound(s));

    u_prev.v = s.u.v;
    v_prev.v = s.v.v;

    if (st.try_step(s, dt_try)) {
      ++out.accepted;
      ++streak;
      prev_valid = true;
      const double sup_now = max_value(s.u);
      rep.sup_ratio = std::max(rep.sup_ratio, sup_now / s.u0_sup);
      const bool due =
          s.step % std::max(1, cfg.diag_every) == 0 ||
          (cfg.snapshot_every > 0 && s.step % cfg.snapshot_every == 0);
      if (sup_now >= cfg.m_blow) {
        sample();
        sup_series.push_back(sup_now);
        threshold_hit = true;
        break;
      }
      if (due) {
        sample();
        sup_series.push_back(sup_now);
      }
      if (streak >= cfg.time.grow_after) {
        dt = std::min(dt * cfg.time.growth, cfg.time.dt_max);
        streak = 0;
      }
    } else {
      ++out.rejected;
      streak = 0;
      prev_valid = false;  // prev now aliases the current state
      dt = 0.5 * std::min(dt, dt_try);
      if (dt < cfg.time.dt_min) {
        out.status = RunStatus::failed;
        out.failure = st.last_rejection();
        break;
      }
    }
  }

  if (rep.rows.empty() || rep.rows.back().t != s.t) {
    sample();
    sup_series.push_back(rep.rows.back().sup_u);
  }

  if (threshold_hit) {
    out.blowup = BlowupVerdict::threshold_exceeded;
    out.status = RunStatus::blowup_flagged;
  } else if (out.status != RunStatus::failed) {
    out.blowup = detect_blowup(sup_series, cfg.m_blow, cfg.growth_window);
    out.status = RunStatus::finished;
  }

  // smallest lattice pair covering the whole run
  for (std::size_t c = 0; c < std::size(kCs); ++c) {
    const double need = lattice_dev[c];
    for (double K : kKs)
      if (need <= K) {
        rep.comparison_C = kCs[c];
        rep.comparison_K = K;
        break;
      }
    if (!std::isnan(rep.comparison_C)) break;
  }

  // audit the lowest weighted energy against the window bound it must obey:
  // slope at most the worst observed positive slope, no linear term
  {
    std::size_t e11 = rep.energy_set.size();
    for (std::size_t k = 0; k < rep.energy_set.size(); ++k)
      if (rep.energy_set[k] == std::pair<int, int>(1, 1)) e11 = k;
    if (e11 < rep.energy_set.size() && rep.rows.size() >= 3) {
      std::vector<double> ts, ys;
      for (const auto& r : rep.rows) {
        if (!ts.empty() && r.t <= ts.back()) continue;
        ts.push_back(r.t);
        ys.push_back(r.energies[e11]);
      }
      if (ts.size() >= 3) {
        double h0 = 0.0;
        for (std::size_t k = 0; k + 1 < ts.size(); ++k)
          h0 = std::max(h0, (ys[k + 1] - ys[k]) / (ts[k + 1] - ts[k]));
        const std::vector<double> gz(ts.size(), 0.0), hv(ts.size(), h0);
        const double r = 0.25 * (ts.back() - ts.front());
        if (r > 0.0) rep.gronwall = gronwall_envelope_audit(ts, ys, gz, hv, r);
        rep.window_sup = sliding_window_sup(ts, ys, 1.0);
      }
    }
  }

  out.final_t = s.t;
  out.final_dt = s.dt_last;
  out.final_mass = rep.rows.back().mass;
  out.final_sup = rep.rows.back().sup_u;
  out.final_u = std::move(s.u);
  out.final_v = std::move(s.v);
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0)
          .count();
  return out;
}

}  // namespace kslab
