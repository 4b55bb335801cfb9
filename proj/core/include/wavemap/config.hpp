#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "wavemap/estimates.hpp"
#include "wavemap/grid.hpp"
#include "wavemap/manifold.hpp"
#include "wavemap/solver.hpp"

namespace wavemap {

enum class ExperimentKind { Run, Convergence, Sweep, DivCurl };

ExperimentKind parse_experiment_kind(std::string_view name);
std::string_view to_string(ExperimentKind kind);

/// Validated run configuration. Grid and time keys have no defaults.
struct RunConfig {
  TargetKind target = TargetKind::UnitSphere;
  int ambient_dim = 3;  // flat target only

  double dr = 0.0;
  double r_max = 0.0;
  double t_end = 0.0;
  double cfl = 0.0;

  InitialData data;

  int save_every = 1;
  // |phi_t| above this aborts the run as unstable.
  double blowup_cap = 1e6;
  std::string output_dir = "wavemap_out";

  bool gauge_enabled = true;
  bool antisymmetrize = true;

  EstimateParams params;
  bool h2_enabled = true;

  ExperimentKind kind = ExperimentKind::Run;
  std::uint64_t seed = 0;

  // Experiment-specific.
  int levels = 3;
  std::vector<double> amplitudes;
  int divcurl_trials = 100;
  int divcurl_grid = 64;
  int divcurl_modes = 4;

  TargetManifold make_target() const;
  RadialGrid make_grid() const;
  double dt() const { return cfl * dr; }

  /// Checks every module precondition; throws ConfigError naming the key.
  void validate() const;

  /// Every key with its effective value, sorted, rendered with 17 digits.
  std::map<std::string, std::string> resolved() const;
};

/// Parses structured text (YAML). Nested maps and dotted keys are both
/// accepted; unknown keys raise ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// 17 significant digits, the round-trip rendering used in every output.
std::string format_double(double x);

}  // namespace wavemap
