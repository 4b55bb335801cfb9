#pragma once

#include <span>
#include <utility>
#include <vector>

#include "wavemap/solver.hpp"

namespace wavemap {

/// Orthonormal pull-back frame e_i(r_j) in exponential gauge (A_1 = 0) on
/// one time slice. e is stored node-major: e[(j * rank + i) * dim + a].
struct GaugeFrame {
  double t = 0.0;
  int nodes = 0;
  int dim = 0;   // ambient n
  int rank = 0;  // intrinsic k
  std::vector<double> e;
  // max_{j,i,l} |<e_i(r_{j+1}) - e_i(r_j), e_l>| / dr, the discrete A_1.
  double transport_residual = 0.0;

  std::span<const double> at(int j, int i) const {
    return {e.data() + (static_cast<std::size_t>(j) * rank + i) * dim, static_cast<std::size_t>(dim)};
  }
  double orthonormality_residual() const;
};

/// Seeds the outer node by Gram-Schmidt on tangent-projected coordinate axes
/// (or on the previous slice's outer frame when given), then transports
/// inward by tangent projection and re-orthonormalization.
GaugeFrame build_frame(const FieldState& state, const GaugeFrame* previous = nullptr);

/// Per-node k x k matrices, M(l, i) at values[(j * k + l) * k + i].
struct MatrixField {
  double t = 0.0;
  int nodes = 0;
  int rank = 0;
  std::vector<double> values;
  // Largest |M + M^T| entry before antisymmetrization (connection_A0 only).
  double defect = 0.0;

  double operator()(int j, int l, int i) const {
    return values[(static_cast<std::size_t>(j) * rank + l) * rank + i];
  }
  double& operator()(int j, int l, int i) {
    return values[(static_cast<std::size_t>(j) * rank + l) * rank + i];
  }
  double max_abs() const;
  double max_antisymmetry_defect() const;
};

/// A_0(l, i) = <D_t e_i, e_l> at the midpoint time by centered differencing.
MatrixField connection_A0(const GaugeFrame& frame_prev, const GaugeFrame& frame_next,
                          bool antisymmetrize = true);

/// F_01(l, i) = <R(phi_t, phi_r) e_i, e_l> through the Gauss equation.
MatrixField curvature_F01(const FieldState& state, const GaugeFrame& frame);

/// A_0(r) = int_r^{r_max} F_01 ds by cumulative midpoint quadrature.
MatrixField integrate_curvature(const RadialGrid& grid, const MatrixField& f01);

/// Frame components of phi_t and phi_r: k entries per node.
struct QComponents {
  std::vector<double> q0;
  std::vector<double> q1;
};

QComponents q_components(const FieldState& state, const GaugeFrame& frame);

/// Three consecutive slices with matched frames; caches the derived
/// frame-level quantities every windowed diagnostic needs.
class SliceWindow {
 public:
  SliceWindow(const FieldState& prev, const FieldState& mid, const FieldState& next,
              const GaugeFrame& frame_prev, const GaugeFrame& frame_mid,
              const GaugeFrame& frame_next, bool antisymmetrize = true);

  const FieldState& prev() const { return prev_; }
  const FieldState& mid() const { return mid_; }
  const FieldState& next() const { return next_; }
  const GaugeFrame& frame_mid() const { return frame_mid_; }
  const RadialGrid& grid() const { return mid_.grid; }
  int rank() const { return frame_mid_.rank; }
  // Half the time separation of prev and next.
  double dt() const { return dt_; }

  const MatrixField& a0() const { return a0_; }
  const QComponents& q_prev() const { return q_prev_; }
  const QComponents& q_mid() const { return q_mid_; }
  const QComponents& q_next() const { return q_next_; }

 private:
  const FieldState& prev_;
  const FieldState& mid_;
  const FieldState& next_;
  const GaugeFrame& frame_mid_;
  double dt_;
  MatrixField a0_;
  QComponents q_prev_, q_mid_, q_next_;
};

struct GaugeResiduals {
  double res_213 = 0.0;  // || d_t q0 + A0 q0 - r^{-1} d_r(r q1) ||_{L2(r dr)}
  double res_214 = 0.0;  // || d_t q1 + A0 q1 - d_r q0 ||_{L2(r dr)}
};

GaugeResiduals gauge_residuals(const SliceWindow& window);

/// (A0 q)_l = sum_i A0(l, i) q_i at node j.
void apply_connection(const MatrixField& a0, int j, std::span<const double> q,
                      std::span<double> out);

}  // namespace wavemap
