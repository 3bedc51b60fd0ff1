#include "kslab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "kslab/io.hpp"
#include "kslab/version.hpp"

namespace kslab {

namespace {
constexpr double kPi = 3.14159265358979323846;

std::string fmt(double x) { return format_g17(x); }

void clause_line(std::string& out, const char* name, const Clause& c) {
  out += name;
  out += ": ";
  out += to_string(c.verdict);
  if (!std::isnan(c.param)) {
    out += " (param ";
    out += fmt(c.param);
    out += ")";
  }
  if (!c.witness.empty()) {
    out += "  -- ";
    out += c.witness;
  }
  out += '\n';
}
}  // namespace

int default_workers() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

double initial_mass(const SimConfig& cfg) {
  const InitialData& d = cfg.u0;
  if (d.kind == InitialData::Kind::constant) {
    double vol = 1.0;
    for (double l : cfg.lengths) vol *= l;
    return d.value * vol;
  }
  if (d.mass > 0.0 && d.kind != InitialData::Kind::file)
    return d.mass;  // the builder rescales to this integral exactly
  Stepper st(cfg);
  return st.make_initial_state().mass0;
}

std::string agreement_of(const RegimeVerdict& rv, const RunResult& rr) {
  if (rr.status == RunStatus::failed) return "not-evaluated";
  if (rv.regime == Regime::uniformly_bounded &&
      rr.blowup != BlowupVerdict::none)
    return "disagrees";
  return "consistent";
}

RunArtifacts run_experiment(const ParsedConfig& pc, const std::string& out_dir,
                            bool quiet) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  const SimConfig& c = pc.sim;
  RunArtifacts art;
  art.out_dir = out_dir;
  art.regime =
      classify_regime(c.dim, c.eps, c.motility, initial_mass(c));

  const double print_every =
      c.t_final > 0.0 ? c.t_final / 20.0
                      : std::numeric_limits<double>::infinity();
  double next_print = 0.0;

  SampleSink sink = [&](const DiagnosticsRow& row, const SimState& state) {
    if (c.snapshot_every > 0 && state.step % c.snapshot_every == 0) {
      char name[32];
      std::snprintf(name, sizeof name, "u_%08ld.ksf", state.step);
      write_field_dump(out_dir + "/" + name, state.u, state.t);
      if (pc.snapshot_images && c.dim == 2) {
        std::snprintf(name, sizeof name, "u_%08ld.pgm", state.step);
        write_pgm(out_dir + "/" + name, state.u);
      }
    }
    if (!quiet && row.t >= next_print) {
      std::printf("t=%-12.6g dt=%-10.4g sup_u=%-12.6g mass_drift=%.3e\n",
                  row.t, row.dt, row.sup_u, row.mass_drift);
      next_print = row.t + print_every;
    }
  };

  art.result = run_simulation(c, sink);
  art.agreement = agreement_of(art.regime, art.result);

  write_timeseries_csv(out_dir + "/timeseries.csv", art.result.report);
  write_field_dump(out_dir + "/final_u.ksf", art.result.final_u,
                   art.result.final_t);
  write_field_dump(out_dir + "/final_v.ksf", art.result.final_v,
                   art.result.final_t);
  if (pc.snapshot_images && c.dim == 2) {
    write_pgm(out_dir + "/final_u.pgm", art.result.final_u);
    write_pgm(out_dir + "/final_v.pgm", art.result.final_v);
  }

  std::vector<std::pair<std::string, std::string>> man;
  man.emplace_back("format", "1");
  man.emplace_back("tool_version", kVersion);
  for (const auto& [k, v] : pc.entries) man.emplace_back("config." + k, v);
  man.emplace_back("motility", c.motility.describe());
  const RunResult& r = art.result;
  const DiagnosticsReport& rep = r.report;
  man.emplace_back("result.status", to_string(r.status));
  man.emplace_back("result.blowup", to_string(r.blowup));
  man.emplace_back("result.regime", to_string(art.regime.regime));
  man.emplace_back("result.rule", art.regime.rule);
  man.emplace_back("result.agreement", art.agreement);
  man.emplace_back("result.accepted", std::to_string(r.accepted));
  man.emplace_back("result.rejected", std::to_string(r.rejected));
  man.emplace_back("result.final_t", fmt(r.final_t));
  man.emplace_back("result.final_mass", fmt(r.final_mass));
  man.emplace_back("result.mass_drift",
                   fmt(rep.rows.empty() ? 0.0 : rep.rows.back().mass_drift));
  man.emplace_back("result.sup_ratio", fmt(rep.sup_ratio));
  man.emplace_back("result.comparison_C", fmt(rep.comparison_C));
  man.emplace_back("result.comparison_K", fmt(rep.comparison_K));
  man.emplace_back("result.gronwall_ok", rep.gronwall.ok ? "true" : "false");
  man.emplace_back("result.window_sup", fmt(rep.window_sup));
  if (!r.failure.empty()) man.emplace_back("result.failure", r.failure);
  man.emplace_back("result.wall_seconds", fmt(r.wall_seconds));
  write_manifest(out_dir + "/manifest.txt", man);

  if (!quiet) {
    std::printf("status=%s blowup=%s regime=%s agreement=%s\n",
                to_string(r.status).c_str(), to_string(r.blowup).c_str(),
                to_string(art.regime.regime), art.agreement.c_str());
  }
  return art;
}

namespace {

// make() runs inside the try so a bad parameter (say a non-positive decay
// exponent) folds into the row instead of aborting the sweep
template <class MakeCfg>
SweepRow run_sweep_item(double param, MakeCfg&& make) {
  SweepRow row;
  row.param = param;
  try {
    const SimConfig cfg = make();
    row.mass = initial_mass(cfg);
    const RegimeVerdict rv =
        classify_regime(cfg.dim, cfg.eps, cfg.motility, row.mass);
    row.regime = to_string(rv.regime);
    row.rule = rv.rule;
    const RunResult rr = run_simulation(cfg, {});
    row.status = rr.status;
    row.blowup = rr.blowup;
    row.sup_ratio = rr.report.sup_ratio;
    row.admissible = agreement_of(rv, rr) != "disagrees";
  } catch (const std::exception& e) {
    row.error = e.what();
    row.status = RunStatus::failed;
    row.admissible = true;  // no outcome to judge
  }
  return row;
}

}  // namespace

std::vector<SweepRow> sweep_critical_mass(const SimConfig& base,
                                          const std::vector<double>& multipliers,
                                          int workers) {
  if (base.motility.family() != MotilityFamily::exponential)
    throw std::invalid_argument(
        "mass sweep needs the exponential motility family (its critical mass "
        "is 4*pi/chi)");
  if (base.dim != 2)
    throw std::invalid_argument("mass sweep is a 2d experiment");
  const double mc = 4.0 * kPi / base.motility.param_chi();
  return parallel_map(multipliers.size(), workers, [&](std::size_t i) {
    return run_sweep_item(multipliers[i], [&] {
      SimConfig cfg = base;
      cfg.u0.mass = multipliers[i] * mc;
      return cfg;
    });
  });
}

std::vector<SweepRow> sweep_decay_exponent(const SimConfig& base,
                                           const std::vector<double>& ks,
                                           int workers) {
  return parallel_map(ks.size(), workers, [&](std::size_t i) {
    return run_sweep_item(ks[i], [&] {
      SimConfig cfg = base;
      cfg.motility = Motility::power(ks[i]);
      return cfg;
    });
  });
}

void write_sweep_csv(const std::string& path, const std::string& param_name,
                     const std::vector<SweepRow>& rows) {
  std::string out = param_name +
                    ",mass,regime,rule,status,blowup,sup_ratio,admissible,error\n";
  for (const SweepRow& r : rows) {
    out += fmt(r.param);
    out += ',';
    out += fmt(r.mass);
    out += ',';
    out += r.regime;
    out += ',';
    out += r.rule;
    out += ',';
    out += to_string(r.status);
    out += ',';
    out += to_string(r.blowup);
    out += ',';
    out += fmt(r.sup_ratio);
    out += ',';
    out += r.admissible ? "true" : "false";
    out += ',';
    // the free-text column gets RFC-4180 quoting
    std::string q = r.error;
    std::size_t at = 0;
    while ((at = q.find('"', at)) != std::string::npos) {
      q.insert(at, 1, '"');
      at += 2;
    }
    out += '"' + q + '"';
    out += '\n';
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << out;
}

std::string format_assumption_report(const AssumptionReport& r) {
  std::string out;
  out += "n=" + std::to_string(r.n) + " eps=" + fmt(r.eps) + "\n";
  clause_line(out, "positivity_monotonicity", r.positivity_monotonicity);
  clause_line(out, "decay_to_zero", r.decay_to_zero);
  clause_line(out, "limit_below_inv_eps", r.limit_below_inv_eps);
  clause_line(out, "poly_lower_bound", r.poly_lower_bound);
  clause_line(out, "subexponential", r.subexponential);
  clause_line(out, "exp_lower_bound", r.exp_lower_bound);
  clause_line(out, "convexity_strict", r.convexity_strict);
  clause_line(out, "convexity_above_half_n", r.convexity_above_half_n);
  clause_line(out, "convexity_integer", r.convexity_integer);
  clause_line(out, "convexity_supremal", r.convexity_supremal);
  return out;
}

std::string format_regime(const RegimeVerdict& rv) {
  std::string out = "regime: ";
  out += to_string(rv.regime);
  out += "\nrule: " + rv.rule + "\n";
  for (const auto& [name, value] : rv.thresholds)
    out += name + " = " + fmt(value) + "\n";
  if (!rv.notes.empty()) out += "note: " + rv.notes + "\n";
  return out;
}

}  // namespace kslab
