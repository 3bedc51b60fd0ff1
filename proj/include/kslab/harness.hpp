#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "kslab/config.hpp"
#include "kslab/motility.hpp"
#include "kslab/stepper.hpp"

// Experiment drivers: one configured run with its artifacts on disk, the two
// parameter sweeps, and the bounded worker pool the sweeps share.

namespace kslab {

// fn(i) for i in [0, count), on at most `workers` threads.  Results keep
// index order regardless of scheduling.  The first exception to escape fn
// is rethrown after all workers drain; sweep items therefore catch their
// own failures and fold them into their row.
template <class F>
auto parallel_map(std::size_t count, int workers, F&& fn)
    -> std::vector<std::invoke_result_t<F&, std::size_t>> {
  using R = std::invoke_result_t<F&, std::size_t>;
  std::vector<R> out(count);
  if (count == 0) return out;
  const int nw = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr first;
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first) first = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nw - 1);
  for (int t = 1; t < nw; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
  return out;
}

int default_workers();

// Integral of the configured initial density on the configured grid.
double initial_mass(const SimConfig& cfg);

// "consistent" when the observed outcome is admissible for the predicted
// regime (a bounded prediction observed to blow up is the one inadmissible
// combination), "disagrees" otherwise, "not-evaluated" for failed runs.
std::string agreement_of(const RegimeVerdict& rv, const RunResult& rr);

struct RunArtifacts {
  RegimeVerdict regime;
  RunResult result;
  std::string agreement;
  std::string out_dir;
};

// Runs one simulation and writes timeseries.csv, manifest.txt, final field
// dumps, and optional periodic snapshots into out_dir.
RunArtifacts run_experiment(const ParsedConfig& cfg, const std::string& out_dir,
                            bool quiet);

struct SweepRow {
  double param = 0.0;  // mass multiplier or decay exponent
  double mass = 0.0;
  std::string regime;
  std::string rule;
  RunStatus status = RunStatus::finished;
  BlowupVerdict blowup = BlowupVerdict::none;
  double sup_ratio = 1.0;
  bool admissible = true;
  std::string error;  // nonempty when the run threw instead of finishing
};

// Scales the initial mass through `multipliers` times the critical value
// 4*pi/chi of the base's exponential motility.
std::vector<SweepRow> sweep_critical_mass(const SimConfig& base,
                                          const std::vector<double>& multipliers,
                                          int workers);

// Replaces the motility with the power family at each exponent in `ks`.
std::vector<SweepRow> sweep_decay_exponent(const SimConfig& base,
                                           const std::vector<double>& ks,
                                           int workers);

void write_sweep_csv(const std::string& path, const std::string& param_name,
                     const std::vector<SweepRow>& rows);

std::string format_assumption_report(const AssumptionReport& r);
std::string format_regime(const RegimeVerdict& rv);

}  // namespace kslab
