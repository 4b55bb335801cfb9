#pragma once

#include <span>
#include <vector>

#include "wavemap/gauge.hpp"
#include "wavemap/solver.hpp"

namespace wavemap {

/// Exponents of the weighted multiplier identities.
struct EstimateParams {
  double alpha = 0.2;
  double beta = 0.2;
  double sigma = 0.01;
  // When set, alpha must satisfy 2 - 2 alpha = 3 beta.
  bool quartic_active = false;
  // Slack allowed below zero before a null-balance flux counts as negative.
  double absorption_margin = 0.0;

  void validate() const;
  /// Alpha used by the quartic estimate, (2 - 3 beta) / 2.
  double quartic_alpha() const { return 1.0 - 1.5 * beta; }
  EstimateParams with_quartic_alpha() const;
};

/// E = 1/2 int r (|phi_t|^2 + |phi_r|^2) dr.
double energy(const FieldState& state);

/// int r^{-beta} (|phi_t|^2 + |phi_r|^2) dr, computed without a frame.
double weighted_norm_frame_free(const FieldState& state, double beta);

/// Q0(r_j) = int_0^{r_j} xi^{-sigma} q1 dxi, k components per node.
std::vector<double> cumulative_Q0(const RadialGrid& grid, std::span<const double> q1, int rank,
                                  double sigma);

struct WeightedNorms {
  double W_beta = 0.0;
  std::vector<double> Q0;  // k per node
  std::vector<double> Q;   // r^{-alpha+sigma} Q0
  double Q0_sup = 0.0;
};

WeightedNorms weighted_norms(const FieldState& state, const GaugeFrame& frame,
                             const EstimateParams& params);

/// L1(dr) norm of the pointwise defect of the alpha-weighted balance law
/// at the middle slice of the window.
double balance_residual(const SliceWindow& window, const EstimateParams& params);

enum class NullForm { Alpha, Beta };

struct NullBalanceFields {
  std::vector<double> P_plus;   // transported along u (pairs with |phi_v|^2)
  std::vector<double> P_minus;  // transported along v (pairs with |phi_u|^2)
  std::vector<double> source;   // G
  // min over nodes of P_-/(r^{1-e}|phi_u|^2) and P_+/(r^{1-e}|phi_v|^2).
  double domination_minus = 0.0;
  double domination_plus = 0.0;
};

/// d_v P_- - d_u P_+ = G with exponent beta (Beta) or alpha (Alpha).
NullBalanceFields null_balance_fields(const SliceWindow& window, const EstimateParams& params,
                                      NullForm which);

/// L1(dr) defect of d_v P_- - d_u P_+ - G at the middle slice.
double null_balance_residual(const SliceWindow& window, const EstimateParams& params,
                             NullForm which);

/// Balance and null-balance residuals plus the null fluxes from one pass;
/// the balance residual always uses alpha.
struct BalanceDiagnostics {
  double balance_residual = 0.0;
  double null_residual = 0.0;
  NullBalanceFields null_fields;
};

BalanceDiagnostics balance_diagnostics(const SliceWindow& window, const EstimateParams& params,
                                       NullForm which = NullForm::Beta);

struct H2Report {
  double E1 = 0.0;          // H^1 energies of phi_t and phi_r
  double G1_abs = 0.0;      // int |G_1| dr
  double G1_tilde_abs = 0.0;
};

H2Report h2_energy(const SliceWindow& window);

/// Per-node integrands of the nonlinear space-time estimates at the
/// middle slice.
struct NonlinearDensities {
  std::vector<double> g1;
  std::vector<double> g2;
  std::vector<double> bilinear;  // r^{2-beta}(|phi_u|^2|psi_v|^2 + |psi_u|^2|phi_v|^2)
  std::vector<double> quartic;   // r^{3 beta}|phi_u|^2|phi_v|^2
  std::vector<double> G1;        // r psi_t . box psi (signed)
  std::vector<double> G1_tilde;
  std::vector<double> G_hat_alpha;  // (1-alpha) r^{-alpha}(|phi_v|^2 - |phi_u|^2), quartic alpha
  std::vector<double> E1;           // H^2 energy density, integrate against dr
  // Squared norms of the underlying derivative fields.
  std::vector<double> phi_u2, phi_v2, psi_u2, psi_v2, phi_t2, phi_r2;
};

NonlinearDensities nonlinear_densities(const SliceWindow& window, const EstimateParams& params);

/// The H^2 report from densities already computed for the window.
H2Report h2_from_densities(const NonlinearDensities& densities, double dr);

struct NonlinearIntegrals {
  double g1_int = 0.0;
  double g2_int = 0.0;
  double bilinear = 0.0;
  double quartic = 0.0;
};

/// Space-time midpoint sums over every interior slice of a densely saved
/// trajectory. frames[i] belongs to trajectory.snapshots[i].
NonlinearIntegrals nonlinear_integrals(const Trajectory& trajectory,
                                       std::span<const GaugeFrame> frames,
                                       const EstimateParams& params);

/// Builds time-coherent frames for every snapshot.
std::vector<GaugeFrame> build_frames(const Trajectory& trajectory);

struct SobolevHardySides {
  double lhs = 0.0;  // int r^beta psi^4 dr
  double rhs = 0.0;  // (int r^-beta psi^2)(int r psi^2)^beta (int r psi_r^2)^{1-beta}
};

SobolevHardySides sobolev_hardy_sides(const RadialGrid& grid, std::span<const double> profile,
                                      double beta);
/// lhs / rhs; throws DegenerateProfile for a vanishing profile.
double sobolev_hardy_ratio(const RadialGrid& grid, std::span<const double> profile, double beta);

}  // namespace wavemap
