#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wavemap/estimates.hpp"
#include "wavemap/gauge.hpp"
#include "wavemap/solver.hpp"

namespace wavemap {

/// Flux densities and sources on a characteristic lattice
///   u_i = -X + i h,  v_l = l h,  t = (u + v)/2,  r = (v - u)/2,
/// covering 0 <= t <= T, r >= 0, u >= -X. Nodes (i, l) with
/// 0 <= i <= nu, 0 <= l <= nv; sources live on cells (i, l)..(i+1, l+1).
struct DivCurlField {
  double T = 0.0;
  double h = 0.0;
  double X = 0.0;
  int a = 0;   // X / h
  int m = 0;   // T / h
  int nu = 0;  // a + m
  int nv = 0;  // a + 2m
  std::vector<double> F11, F12, F21, F22;  // (nu+1) x (nv+1), index i*(nv+1)+l
  std::vector<double> G1, G2;              // nu x nv cells, index i*nv+l

  // Invariant tolerances, absolute.
  double nonneg_tolerance = 1e-14;
  double axis_tolerance = 1e-12;
  double pde_tolerance = 1e-10;

  DivCurlField() = default;
  DivCurlField(double T, double X, double h);

  std::size_t node(int i, int l) const { return static_cast<std::size_t>(i) * (nv + 1) + l; }
  std::size_t cell(int i, int l) const { return static_cast<std::size_t>(i) * nv + l; }
  double u(int i) const { return -X + i * h; }
  double v(int l) const { return l * h; }
  double t_of(int i, int l) const { return 0.5 * (i + l - a) * h; }
  double r_of(int i, int l) const { return 0.5 * (l - i + a) * h; }
  bool inside(int i, int l) const { return i + l >= a && i + l <= a + 2 * m && l - i >= -a; }
  /// Fraction of the cell inside the region: 0, 1/2 or 1.
  double cell_weight(int i, int l) const;

  /// Sets G1, G2 from the discrete box-scheme operators
  /// d_u F11 + d_v F12 and d_u F21 - d_v F22.
  void define_sources();
};

struct InvariantReport {
  double min_flux = 0.0;       // most negative F entry (0 if none)
  double axis_residual = 0.0;  // max |F11 - F12|, |F21 + F22| at r = 0
  double pde_residual = 0.0;   // max cell defect of the two balance laws
  double total() const { return std::max(-min_flux, 0.0) + axis_residual + pde_residual; }
};

InvariantReport check_invariants(const DivCurlField& field);
/// Throws InvariantViolation when a residual exceeds its tolerance.
InvariantReport require_invariants(const DivCurlField& field);

struct FluxBounds {
  double lhs1 = 0.0, rhs1 = 0.0, lhs2 = 0.0, rhs2 = 0.0;
  double ratio1 = 0.0, ratio2 = 0.0;
};

struct BilinearBound {
  double lhs = 0.0, rhs = 0.0, ratio = 0.0;
};

// Building blocks, exposed for the brute-force oracles.
/// int (Fa + Fb) dr over the slice t = t_index * h/2 (0 or T), trapezoid.
double slice_integral(const DivCurlField& f, const std::vector<double>& Fa,
                      const std::vector<double>& Fb, bool final_slice);
/// int int |G| dr dt over the region.
double source_integral(const DivCurlField& f, const std::vector<double>& G);
/// sup_u int F dr along v (fixed u) and sup_v int F dr along u (fixed v);
/// characteristic integrals measured in r.
double sup_along_v(const DivCurlField& f, const std::vector<double>& F);
double sup_along_u(const DivCurlField& f, const std::vector<double>& F);

/// ratio = lhs / rhs, 0 when both vanish, +inf when only rhs does.
double safe_ratio(double lhs, double rhs);

FluxBounds flux_bounds(const DivCurlField& field);
BilinearBound bilinear_bound(const DivCurlField& field);

/// Random smooth field: F11 = (s + (v-u) p)^2, F12 = (s + (v-u) q)^2,
/// F21 = ((v-u) m)^2, F22 = ((v-u) n)^2 with tapered band-limited s, p, q,
/// m, n. Sources come from define_sources. cells = T / h, X = T.
DivCurlField synthesize_field(std::uint64_t seed, int cells, int modes = 4, double T = 1.0);

/// F11 = F12 = phi(r) with phi a bump in r < T/2 and G1 = 0; F21 = A(v),
/// F22 = B(u) supported in v > T and u < 0, G2 = 0.
DivCurlField bump_field(int cells, double T = 1.0);

enum class SolutionPair {
  NullFlux,  // F21 = P_+, F22 = P_-, G2 = -G_beta
  Direct,    // F21 = r^{1-beta}|phi_v|^2, F22 = r^{1-beta}|phi_u|^2
};

/// Resamples a densely saved run onto a lattice with h = stride * dr.
/// F11 = r|psi_v|^2, F12 = r|psi_u|^2 (psi = phi_t), G1 = r psi_t . box psi / 2.
DivCurlField fields_from_solution(const Trajectory& trajectory,
                                  std::span<const GaugeFrame> frames,
                                  const EstimateParams& params,
                                  SolutionPair pair = SolutionPair::NullFlux, int stride = 1);

}  // namespace wavemap
