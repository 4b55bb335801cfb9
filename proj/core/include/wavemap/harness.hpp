#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "wavemap/config.hpp"
#include "wavemap/diagnostics.hpp"
#include "wavemap/divcurl.hpp"

namespace wavemap {

std::string_view version();

/// Column-ordered numeric table; written as CSV with 17 significant digits.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::string to_csv() const;
};

/// Outcome of one experiment.
struct RunRecord {
  std::map<std::string, std::string> config;
  Table series;
  // Named scalar results (extrema, orders, monotonicity flags) for the manifest.
  std::map<std::string, double> results;
  std::string status = "ok";
  double wall_seconds = 0.0;
  std::string version_tag;
};

/// Worker count: hardware concurrency, capped by WAVEMAP_THREADS.
int worker_count();

/// Runs fn(0..n-1) on worker_count() threads. Results must be written by
/// index so the outcome does not depend on scheduling. The first exception
/// (lowest index) is rethrown after all tasks finish.
void parallel_for(int n, const std::function<void(int)>& fn);

/// Single simulation with streaming diagnostics; no files written.
struct SimulationResult {
  FieldState final_state;
  std::vector<DiagnosticsRecord> records;
  DiagnosticsSummary summary;
  double dt = 0.0;
  long steps = 0;
};

SimulationResult simulate(const RunConfig& config, bool diagnostics = true);

/// L2(r dr) distance between the final maps of a coarse run and a finer
/// reference whose dr is an even integer fraction of the coarse one.
double solution_error(const FieldState& coarse, const FieldState& fine);

struct ConvergenceLevel {
  double dr = 0.0;
  double solution_error = 0.0;
  DiagnosticsSummary summary;
};

struct ConvergenceReport {
  std::vector<ConvergenceLevel> levels;
  double reference_dr = 0.0;
  // Pairwise orders log2(e_k / e_{k+1}).
  std::vector<double> solution_orders, gauge213_orders, gauge214_orders, balance_orders,
      null_orders, f01_orders, drift_orders;

  Table table() const;
};

/// Runs dr, dr/2, ..., dr/2^{levels-1} plus a reference at a quarter of the
/// finest dr.
ConvergenceReport convergence_study(const RunConfig& config, int levels);

struct SweepEntry {
  double amplitude = 0.0;
  std::string status = "ok";
  DiagnosticsSummary summary;
};

struct SweepReport {
  std::vector<SweepEntry> entries;
  bool E0_increasing = false;
  bool g1_increasing = false;
  bool g2_increasing = false;
  bool G_beta_increasing = false;
  double max_h2_ratio = 0.0;

  Table table() const;
};

SweepReport amplitude_sweep(const RunConfig& config, const std::vector<double>& amplitudes);

struct DivCurlTrial {
  std::uint64_t seed = 0;
  FluxBounds flux;
  BilinearBound bilinear;
  InvariantReport invariants;
};

struct DivCurlReport {
  std::vector<DivCurlTrial> trials;
  double max_ratio1 = 0.0, max_ratio2 = 0.0, max_bilinear = 0.0;
  double bump_ratio1 = 0.0;

  Table table() const;
};

DivCurlReport divcurl_corpus(std::uint64_t seed, int trials, int cells, int modes = 4);

/// Executes the configured experiment and writes manifest.yaml and
/// series.csv into config.output_dir.
RunRecord run_experiment(const RunConfig& config);

void write_record(const RunRecord& record, const std::filesystem::path& dir);

}  // namespace wavemap
