#include "wavemap/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wavemap {

const std::vector<std::string>& DiagnosticsRecord::columns() {
  static const std::vector<std::string> names = {
      "t",          "E",           "energy_drift",  "constraint",     "preprojection",
      "W_beta",     "Q0_sup",      "h2",            "balance_residual", "null_residual",
      "g1_int",     "g2_int",      "G_beta_int",    "null_bilinear",  "null_quartic",
      "a0_rmax_bound", "gauge_res_213", "gauge_res_214", "f01_consistency"};
  return names;
}

std::vector<double> DiagnosticsRecord::values() const {
  return {t,          E,           energy_drift,  constraint,     preprojection,
          W_beta,     Q0_sup,      h2,            balance_residual, null_residual,
          g1_int,     g2_int,      G_beta_int,    null_bilinear,  null_quartic,
          a0_rmax_bound, gauge_res_213, gauge_res_214, f01_consistency};
}

DiagnosticsRecorder::DiagnosticsRecorder(DiagnosticsOptions options) : options_(options) {
  options_.params.validate();
  if (options_.record_every < 1) options_.record_every = 1;
  summary_.min_domination = std::numeric_limits<double>::infinity();
}

Observer DiagnosticsRecorder::observer() {
  return [this](const FieldState& s) { observe(s); };
}

void DiagnosticsRecorder::observe(const FieldState& state) {
  const double e = energy(state);
  if (!have_e0_) {
    summary_.E0 = e;
    have_e0_ = true;
  }
  if (summary_.E0 > 0.0)
    summary_.max_energy_drift =
        std::max(summary_.max_energy_drift, std::fabs(e - summary_.E0) / summary_.E0);
  summary_.max_constraint = std::max(summary_.max_constraint, state.constraint_residual());
  summary_.max_preprojection = std::max(summary_.max_preprojection, state.preprojection_residual);

  FieldState copy = state;
  copy.phi_prev = {};
  copy.phi_prev2 = {};
  copy.phi_t_prev = {};
  GaugeFrame frame = build_frame(copy, last_frame_ ? &*last_frame_ : nullptr);
  last_frame_ = frame;
  states_.push_back(std::move(copy));
  frames_.push_back(std::move(frame));
  energies_.push_back(e);
  if (states_.size() == 3) {
    process_window();
    states_.pop_front();
    frames_.pop_front();
    energies_.pop_front();
  }
}

void DiagnosticsRecorder::process_window() {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  const SliceWindow w(states_[0], states_[1], states_[2], frames_[0], frames_[1], frames_[2],
                      options_.antisymmetrize);
  const FieldState& mid = w.mid();
  const RadialGrid& grid = w.grid();
  const int J = grid.size();
  const double dr = grid.dr();
  const double dt = w.dt();
  const EstimateParams& P = options_.params;
  DiagnosticsSummary& S = summary_;
  ++index_;
  ++S.windows;

  DiagnosticsRecord rec;
  rec.t = mid.t;
  rec.E = energies_[1];
  rec.energy_drift = S.E0 > 0.0 ? std::fabs(rec.E - S.E0) / S.E0 : 0.0;
  rec.constraint = mid.constraint_residual();
  rec.preprojection = mid.preprojection_residual;

  if (options_.gauge) {
    const GaugeResiduals gr = gauge_residuals(w);
    rec.gauge_res_213 = gr.res_213;
    rec.gauge_res_214 = gr.res_214;
    const BalanceDiagnostics bd = balance_diagnostics(w, P, NullForm::Beta);
    rec.balance_residual = bd.balance_residual;
    rec.null_residual = bd.null_residual;
    const WeightedNorms wn = weighted_norms(mid, w.frame_mid(), P);
    rec.W_beta = wn.W_beta;
    rec.Q0_sup = wn.Q0_sup;

    const NullBalanceFields& nf = bd.null_fields;
    double gb = 0.0;
    for (double x : nf.source) gb += std::fabs(x);
    S.G_beta_int += gb * dr * dt;
    S.min_domination = std::min({S.min_domination, nf.domination_minus, nf.domination_plus});

    const MatrixField& a0 = w.a0();
    const MatrixField a0_curv = integrate_curvature(grid, curvature_F01(mid, w.frame_mid()));
    const int k = w.rank();
    double bound = 0.0, diff = 0.0;
    for (int j = 0; j < J; ++j)
      for (int l = 0; l < k; ++l)
        for (int i = 0; i < k; ++i) {
          bound = std::max(bound, grid.r(j) * std::fabs(a0(j, l, i)));
          diff = std::max(diff, std::fabs(a0(j, l, i) - a0_curv(j, l, i)));
        }
    rec.a0_rmax_bound = bound;
    rec.f01_consistency = diff;

    S.max_gauge_213 = std::max(S.max_gauge_213, gr.res_213);
    S.max_gauge_214 = std::max(S.max_gauge_214, gr.res_214);
    S.max_balance = std::max(S.max_balance, rec.balance_residual);
    S.max_null = std::max(S.max_null, rec.null_residual);
    S.int_balance += rec.balance_residual * dt;
    S.int_null += rec.null_residual * dt;
    S.max_a0_rmax = std::max(S.max_a0_rmax, bound);
    S.max_f01_consistency = std::max(S.max_f01_consistency, diff);
    S.max_a0_defect = std::max(S.max_a0_defect, a0.defect);
    S.max_transport = std::max(S.max_transport, w.frame_mid().transport_residual);
    S.W_beta_int += rec.W_beta * dt;
  } else {
    rec.W_beta = rec.Q0_sup = rec.balance_residual = rec.null_residual = nan;
    rec.a0_rmax_bound = rec.gauge_res_213 = rec.gauge_res_214 = rec.f01_consistency = nan;
  }
  rec.G_beta_int = options_.gauge ? S.G_beta_int : nan;

  if (options_.h2) {
    const NonlinearDensities d = nonlinear_densities(w, P);
    const H2Report h2 = h2_from_densities(d, dr);
    rec.h2 = h2.E1;
    S.G1_abs_int += (h2.G1_abs + h2.G1_tilde_abs) * dt;
    if (S.windows == 1) S.h2_initial = rec.h2;
    S.h2_sup = std::max(S.h2_sup, rec.h2);
    double g1 = 0.0, g2 = 0.0, bl = 0.0, qu = 0.0, gh = 0.0;
    for (int j = 0; j < J; ++j) {
      g1 += d.g1[j];
      g2 += d.g2[j];
      bl += d.bilinear[j];
      qu += d.quartic[j];
      gh += std::fabs(d.G_hat_alpha[j]);
    }
    const double cell = dr * dt;
    S.g1_int += g1 * cell;
    S.g2_int += g2 * cell;
    S.null_bilinear += bl * cell;
    S.null_quartic += qu * cell;
    S.G_hat_alpha_int += gh * cell;
    rec.g1_int = S.g1_int;
    rec.g2_int = S.g2_int;
    rec.null_bilinear = S.null_bilinear;
    rec.null_quartic = S.null_quartic;
  } else {
    rec.h2 = rec.g1_int = rec.g2_int = rec.null_bilinear = rec.null_quartic = nan;
  }

  if ((index_ - 1) % options_.record_every == 0) records_.push_back(rec);
}

}  // namespace wavemap
