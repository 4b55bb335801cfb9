#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "wavemap/estimates.hpp"
#include "wavemap/gauge.hpp"
#include "wavemap/solver.hpp"

namespace wavemap {

/// One row of the time series, evaluated at an interior slice t_n from the
/// window (t_{n-1}, t_n, t_{n+1}). Frame-dependent entries are NaN when the
/// gauge diagnostics are off; H^2 entries are NaN when they are off.
struct DiagnosticsRecord {
  double t = 0.0;
  double E = 0.0;
  double energy_drift = 0.0;  // |E - E0| / E0 (0 when E0 = 0)
  double constraint = 0.0;
  double preprojection = 0.0;
  double W_beta = 0.0;
  double Q0_sup = 0.0;
  double h2 = 0.0;
  double balance_residual = 0.0;
  double null_residual = 0.0;
  double g1_int = 0.0;
  double g2_int = 0.0;
  double G_beta_int = 0.0;
  double null_bilinear = 0.0;
  double null_quartic = 0.0;
  double a0_rmax_bound = 0.0;   // sup_r r |A0|
  double gauge_res_213 = 0.0;
  double gauge_res_214 = 0.0;
  double f01_consistency = 0.0; // |A0 by differencing - A0 by curvature integral|_inf

  static const std::vector<std::string>& columns();
  std::vector<double> values() const;
};

struct DiagnosticsOptions {
  bool gauge = true;
  bool antisymmetrize = true;
  bool h2 = true;
  int record_every = 1;
  EstimateParams params;
};

/// Whole-run extrema and totals.
struct DiagnosticsSummary {
  double E0 = 0.0;
  double max_energy_drift = 0.0;
  double max_constraint = 0.0;
  double max_preprojection = 0.0;
  double max_gauge_213 = 0.0;
  double max_gauge_214 = 0.0;
  double max_balance = 0.0;
  double max_null = 0.0;
  double int_balance = 0.0;  // int residual dt
  double int_null = 0.0;
  double max_a0_rmax = 0.0;
  double max_f01_consistency = 0.0;
  double max_a0_defect = 0.0;
  double max_transport = 0.0;
  double min_domination = 0.0;
  double h2_initial = 0.0;
  double h2_sup = 0.0;
  double G1_abs_int = 0.0;  // int int |G_1| + |G_1~| dr dt
  double g1_int = 0.0;
  double g2_int = 0.0;
  double G_beta_int = 0.0;
  double G_hat_alpha_int = 0.0;
  double null_bilinear = 0.0;
  double null_quartic = 0.0;
  double W_beta_int = 0.0;
  long windows = 0;
};

/// Streaming observer: keeps the last three slices and their frames, so a
/// run of any length needs O(J) memory.
class DiagnosticsRecorder {
 public:
  explicit DiagnosticsRecorder(DiagnosticsOptions options);

  void observe(const FieldState& state);
  Observer observer();

  const std::vector<DiagnosticsRecord>& records() const { return records_; }
  const DiagnosticsSummary& summary() const { return summary_; }

 private:
  void process_window();

  DiagnosticsOptions options_;
  std::deque<FieldState> states_;
  std::deque<GaugeFrame> frames_;
  std::deque<double> energies_;
  std::optional<GaugeFrame> last_frame_;
  std::vector<DiagnosticsRecord> records_;
  DiagnosticsSummary summary_;
  long index_ = 0;  // index of the middle slice of the next window
  bool have_e0_ = false;
};

}  // namespace wavemap
