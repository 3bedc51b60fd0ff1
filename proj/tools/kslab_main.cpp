#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kslab/config.hpp"
#include "kslab/harness.hpp"
#include "kslab/io.hpp"
#include "kslab/version.hpp"

// Exit codes: 0 success, 1 bad usage or bad configuration, 2 a run failed
// to complete, 3 a sweep with failed or inadmissible rows.

namespace {

struct Common {
  std::string config_path;
  std::string out_dir;
  bool quiet = false;
  long seed = -1;               // -1: keep the config's seed
  int snapshot_every = -1;      // -1: keep the config's cadence
  int workers = 0;              // 0: hardware default
};

kslab::ParsedConfig load_with_overrides(const Common& c) {
  kslab::ParsedConfig pc = kslab::load_config(c.config_path);
  if (c.seed >= 0) pc.sim.seed = static_cast<std::uint64_t>(c.seed);
  if (c.snapshot_every >= 0) pc.sim.snapshot_every = c.snapshot_every;
  return pc;
}

int sweep_exit(const std::vector<kslab::SweepRow>& rows) {
  for (const auto& r : rows)
    if (!r.error.empty() || !r.admissible) return 3;
  return 0;
}

void print_sweep(const std::vector<kslab::SweepRow>& rows,
                 const char* param_name, bool quiet) {
  if (quiet) return;
  std::printf("%-10s %-12s %-34s %-16s %-18s %-10s %s\n", param_name, "mass",
              "regime", "status", "blowup", "sup_ratio", "admissible");
  for (const auto& r : rows) {
    if (!r.error.empty()) {
      std::printf("%-10.5g %-12.5g run failed: %s\n", r.param, r.mass,
                  r.error.c_str());
      continue;
    }
    std::printf("%-10.5g %-12.5g %-34s %-16s %-18s %-10.4g %s\n", r.param,
                r.mass, r.regime.c_str(), kslab::to_string(r.status).c_str(),
                kslab::to_string(r.blowup).c_str(), r.sup_ratio,
                r.admissible ? "yes" : "NO");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for density dynamics with "
               "signal-suppressed motility"};
  app.set_version_flag("--version", kslab::kVersion);
  app.require_subcommand(1);

  Common c;
  std::vector<double> multipliers{0.25, 0.5, 0.8, 0.9, 1.1, 1.5, 2.0, 4.0};
  std::vector<double> exponents{0.25, 0.5, 1.0, 2.0};
  int cm_n = 0;        // 0: take the config's dim
  double cm_eps = -1;  // <0: take the config's epsilon
  double s_max = 1e6;

  auto add_common = [&](CLI::App* sub, bool needs_out) {
    sub->add_option("config", c.config_path, "run configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    if (needs_out)
      sub->add_option("-o,--out", c.out_dir, "output directory")->required();
    sub->add_flag("-q,--quiet", c.quiet, "suppress progress output");
    sub->add_option("--seed", c.seed, "override the config's seed");
    sub->add_option("--snapshot-every", c.snapshot_every,
                    "override the snapshot cadence (accepted steps)");
    sub->add_option("--workers", c.workers,
                    "worker threads for sweeps (default: hardware)");
  };

  CLI::App* run = app.add_subcommand("run", "one simulation with artifacts");
  add_common(run, true);

  CLI::App* sm = app.add_subcommand(
      "sweep-mass", "scan initial mass across the critical value");
  add_common(sm, true);
  sm->add_option("--multipliers", multipliers,
                 "initial mass as multiples of the critical mass")
      ->delimiter(',');

  CLI::App* sk = app.add_subcommand(
      "sweep-k", "scan the power-family decay exponent");
  add_common(sk, true);
  sk->add_option("--exponents", exponents, "decay exponents to run")
      ->delimiter(',');

  CLI::App* chk = app.add_subcommand(
      "check-motility", "report which structural conditions the motility satisfies");
  add_common(chk, false);
  chk->add_option("--n", cm_n, "space dimension for the report");
  chk->add_option("--eps", cm_eps, "signal relaxation time for the report");
  chk->add_option("--s-max", s_max, "tail horizon for asymptotic clauses");

  CLI::App* cls = app.add_subcommand(
      "classify", "predict the regime for the configured run");
  add_common(cls, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    const int workers = c.workers > 0 ? c.workers : kslab::default_workers();

    if (run->parsed()) {
      const kslab::ParsedConfig pc = load_with_overrides(c);
      const kslab::RunArtifacts art =
          kslab::run_experiment(pc, c.out_dir, c.quiet);
      if (art.result.status == kslab::RunStatus::failed) {
        std::fprintf(stderr, "run failed: %s\n", art.result.failure.c_str());
        return 2;
      }
      return 0;
    }

    if (sm->parsed() || sk->parsed()) {
      const kslab::ParsedConfig pc = load_with_overrides(c);
      std::filesystem::create_directories(c.out_dir);
      std::vector<kslab::SweepRow> rows;
      const char* pname;
      if (sm->parsed()) {
        rows = kslab::sweep_critical_mass(pc.sim, multipliers, workers);
        pname = "multiplier";
      } else {
        rows = kslab::sweep_decay_exponent(pc.sim, exponents, workers);
        pname = "k";
      }
      kslab::write_sweep_csv(c.out_dir + "/sweep.csv", pname, rows);
      print_sweep(rows, pname, c.quiet);
      return sweep_exit(rows);
    }

    if (chk->parsed()) {
      const kslab::ParsedConfig pc = load_with_overrides(c);
      const int n = cm_n > 0 ? cm_n : pc.sim.dim;
      const double eps = cm_eps >= 0 ? cm_eps : pc.sim.eps;
      const kslab::AssumptionReport rep =
          kslab::check_assumptions(pc.sim.motility, n, eps, s_max);
      std::printf("%s\n%s", pc.sim.motility.describe().c_str(),
                  kslab::format_assumption_report(rep).c_str());
      return 0;
    }

    if (cls->parsed()) {
      const kslab::ParsedConfig pc = load_with_overrides(c);
      const double mass = kslab::initial_mass(pc.sim);
      const kslab::RegimeVerdict rv = kslab::classify_regime(
          pc.sim.dim, pc.sim.eps, pc.sim.motility, mass);
      std::printf("mass = %s\n%s", kslab::format_g17(mass).c_str(),
                  kslab::format_regime(rv).c_str());
      return 0;
    }
  } catch (const kslab::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
