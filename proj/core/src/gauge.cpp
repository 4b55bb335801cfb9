#include "wavemap/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "wavemap/error.hpp"

namespace wavemap {

namespace {

// Seed candidates whose orthogonalized remainder is shorter than this are
// skipped; transport remainders this short are fatal.
constexpr double kSeedThreshold = 0.25;
constexpr double kTransportThreshold = 1e-6;

// Every target has ambient dimension at most 4; larger flat targets spill to the heap.
using Small = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;

// Orthonormalize `v` against the first `count` rows of `basis`; returns the
// remainder length before normalization.
double gram_schmidt(std::span<const double> basis, int count, int dim, std::span<double> v) {
  for (int pass = 0; pass < 2; ++pass) {
    for (int m = 0; m < count; ++m) {
      std::span<const double> b(basis.data() + m * dim, dim);
      vec::axpy(-vec::dot(v, b), b, v);
    }
  }
  const double len = vec::norm(v);
  if (len > 0.0) vec::scale(1.0 / len, v);
  return len;
}

// Inward transport: D_r e_i = 0 discretized as tangent projection followed
// by symmetric (Loewdin) orthonormalization. The overlap between
// neighbouring frames is then a symmetric matrix, so the discrete A_1 is
// zero up to rounding.
template <class Mat>
void transport_inward(const FieldState& state, GaugeFrame& frame) {
  const int k = frame.rank, n = frame.dim;
  std::vector<double> v(n);
  Mat V(k, n), S(k, k), inv_sqrt(k, k), E(k, n);
  Eigen::SelfAdjointEigenSolver<Mat> eig(k);
  for (int j = frame.nodes - 2; j >= 0; --j) {
    const auto p = state.phi_at(j);
    for (int i = 0; i < k; ++i) {
      const auto src = frame.at(j + 1, i);
      std::copy(src.begin(), src.end(), v.begin());
      state.target.tangent_project_in_place(p, v);
      for (int a = 0; a < n; ++a) V(i, a) = v[a];
    }
    S.noalias() = V * V.transpose();
    eig.compute(S);
    if (eig.eigenvalues().minCoeff() < kTransportThreshold * kTransportThreshold) {
      std::ostringstream os;
      os << "transport collapsed at r = " << state.grid.r(j);
      throw Error(ErrorCode::DegenerateFrame, os.str());
    }
    inv_sqrt.noalias() = eig.eigenvectors() *
                         eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                         eig.eigenvectors().transpose();
    E.noalias() = inv_sqrt * V;
    for (int i = 0; i < k; ++i)
      for (int a = 0; a < n; ++a)
        frame.e[(static_cast<std::size_t>(j) * k + i) * n + a] = E(i, a);
  }
}

}  // namespace

double GaugeFrame::orthonormality_residual() const {
  double m = 0.0;
  for (int j = 0; j < nodes; ++j)
    for (int i = 0; i < rank; ++i)
      for (int l = 0; l < rank; ++l)
        m = std::max(m, std::fabs(vec::dot(at(j, i), at(j, l)) - (i == l ? 1.0 : 0.0)));
  return m;
}

GaugeFrame build_frame(const FieldState& state, const GaugeFrame* previous) {
  const auto& target = state.target;
  GaugeFrame frame;
  frame.t = state.t;
  frame.nodes = state.nodes();
  frame.dim = target.ambient_dim();
  frame.rank = target.intrinsic_dim();
  const int J = frame.nodes, n = frame.dim, k = frame.rank;
  frame.e.assign(static_cast<std::size_t>(J) * k * n, 0.0);

  if (previous && (previous->nodes != J || previous->dim != n || previous->rank != k))
    throw Error(ErrorCode::FrameMismatch, "previous frame lives on a different grid or target");

  // Outer seed.
  const int outer = J - 1;
  std::span<double> seed(frame.e.data() + static_cast<std::size_t>(outer) * k * n,
                         static_cast<std::size_t>(k) * n);
  const auto p_outer = state.phi_at(outer);
  int accepted = 0;
  const int candidates = previous ? k : n;
  std::vector<double> v(n);
  for (int c = 0; c < candidates && accepted < k; ++c) {
    if (previous) {
      const auto src = previous->at(outer, c);
      std::copy(src.begin(), src.end(), v.begin());
    } else {
      std::fill(v.begin(), v.end(), 0.0);
      v[c] = 1.0;
    }
    target.tangent_project_in_place(p_outer, v);
    const double len = gram_schmidt(seed, accepted, n, v);
    if (len < kSeedThreshold) {
      if (previous)
        throw Error(ErrorCode::DegenerateFrame, "previous outer frame degenerates on this slice");
      continue;
    }
    std::copy(v.begin(), v.end(), seed.begin() + accepted * n);
    ++accepted;
  }
  if (accepted < k)
    throw Error(ErrorCode::DegenerateFrame, "projected coordinate axes do not span the tangent space");

  if (n <= 4)
    transport_inward<Small>(state, frame);
  else
    transport_inward<Eigen::MatrixXd>(state, frame);

  double res = 0.0;
  std::vector<double> diff(n), avg(n);
  for (int j = 0; j + 1 < J; ++j) {
    for (int i = 0; i < k; ++i) {
      for (int a = 0; a < n; ++a) diff[a] = frame.at(j + 1, i)[a] - frame.at(j, i)[a];
      for (int l = 0; l < k; ++l) {
        for (int a = 0; a < n; ++a) avg[a] = 0.5 * (frame.at(j + 1, l)[a] + frame.at(j, l)[a]);
        res = std::max(res, std::fabs(vec::dot(diff, avg)));
      }
    }
  }
  frame.transport_residual = res / state.grid.dr();
  return frame;
}

double MatrixField::max_abs() const { return vec::max_abs(values); }

double MatrixField::max_antisymmetry_defect() const {
  double m = 0.0;
  for (int j = 0; j < nodes; ++j)
    for (int l = 0; l < rank; ++l)
      for (int i = 0; i < rank; ++i) m = std::max(m, std::fabs((*this)(j, l, i) + (*this)(j, i, l)));
  return m;
}

MatrixField connection_A0(const GaugeFrame& prev, const GaugeFrame& next, bool antisymmetrize) {
  if (prev.nodes != next.nodes || prev.dim != next.dim || prev.rank != next.rank)
    throw Error(ErrorCode::FrameMismatch, "frames live on different grids or targets");
  const double span = next.t - prev.t;
  if (!(span > 0.0)) throw Error(ErrorCode::FrameMismatch, "frames are not ordered in time");
  const int J = prev.nodes, n = prev.dim, k = prev.rank;
  // Frames seeded independently can differ by a reflection or permutation at
  // the outer node; that makes A0 meaningless.
  for (int i = 0; i < k; ++i) {
    double d = 0.0;
    for (int a = 0; a < n; ++a) d += std::pow(next.at(J - 1, i)[a] - prev.at(J - 1, i)[a], 2);
    if (std::sqrt(d) > 0.5)
      throw Error(ErrorCode::FrameMismatch, "outer seeds of consecutive frames disagree");
  }

  MatrixField a0;
  a0.t = 0.5 * (prev.t + next.t);
  a0.nodes = J;
  a0.rank = k;
  a0.values.assign(static_cast<std::size_t>(J) * k * k, 0.0);
  std::vector<double> de(n), avg(n);
  for (int j = 0; j < J; ++j) {
    for (int i = 0; i < k; ++i) {
      for (int a = 0; a < n; ++a) de[a] = (next.at(j, i)[a] - prev.at(j, i)[a]) / span;
      for (int l = 0; l < k; ++l) {
        for (int a = 0; a < n; ++a) avg[a] = 0.5 * (next.at(j, l)[a] + prev.at(j, l)[a]);
        a0(j, l, i) = vec::dot(de, avg);
      }
    }
  }
  a0.defect = a0.max_antisymmetry_defect();
  if (antisymmetrize) {
    for (int j = 0; j < J; ++j)
      for (int l = 0; l < k; ++l)
        for (int i = l; i < k; ++i) {
          const double m = 0.5 * (a0(j, l, i) - a0(j, i, l));
          a0(j, l, i) = m;
          a0(j, i, l) = -m;
        }
  }
  return a0;
}

MatrixField curvature_F01(const FieldState& state, const GaugeFrame& frame) {
  if (frame.nodes != state.nodes() || frame.dim != state.dim())
    throw Error(ErrorCode::FrameMismatch, "frame does not belong to this state");
  const int J = frame.nodes, k = frame.rank;
  MatrixField f;
  f.t = state.t;
  f.nodes = J;
  f.rank = k;
  f.values.assign(static_cast<std::size_t>(J) * k * k, 0.0);
  if (state.target.kind() == TargetKind::Flat) return f;
  const auto dphi = spatial_derivative(state);
  const int n = state.dim();
  for (int j = 0; j < J; ++j) {
    std::span<const double> dr(dphi.data() + j * n, n);
    for (int l = 0; l < k; ++l)
      for (int i = 0; i < k; ++i)
        f(j, l, i) = state.target.curvature_ambient(state.phi_at(j), state.phi_t_at(j), dr,
                                                    frame.at(j, i), frame.at(j, l));
  }
  return f;
}

MatrixField integrate_curvature(const RadialGrid& grid, const MatrixField& f01) {
  MatrixField a = f01;
  const int J = f01.nodes, kk = f01.rank * f01.rank;
  const double dr = grid.dr();
  std::vector<double> tail(kk, 0.0);
  for (int j = J - 1; j >= 0; --j) {
    for (int m = 0; m < kk; ++m) {
      const double fj = f01.values[static_cast<std::size_t>(j) * kk + m];
      a.values[static_cast<std::size_t>(j) * kk + m] = tail[m] + 0.5 * dr * fj;
      tail[m] += dr * fj;
    }
  }
  return a;
}

QComponents q_components(const FieldState& state, const GaugeFrame& frame) {
  if (frame.nodes != state.nodes() || frame.dim != state.dim())
    throw Error(ErrorCode::FrameMismatch, "frame does not belong to this state");
  const int J = frame.nodes, k = frame.rank, n = frame.dim;
  const auto dphi = spatial_derivative(state);
  QComponents q;
  q.q0.resize(static_cast<std::size_t>(J) * k);
  q.q1.resize(static_cast<std::size_t>(J) * k);
  for (int j = 0; j < J; ++j) {
    std::span<const double> dr(dphi.data() + j * n, n);
    for (int i = 0; i < k; ++i) {
      q.q0[j * k + i] = vec::dot(state.phi_t_at(j), frame.at(j, i));
      q.q1[j * k + i] = vec::dot(dr, frame.at(j, i));
    }
  }
  return q;
}

void apply_connection(const MatrixField& a0, int j, std::span<const double> q, std::span<double> out) {
  const int k = a0.rank;
  for (int l = 0; l < k; ++l) {
    double s = 0.0;
    for (int i = 0; i < k; ++i) s += a0(j, l, i) * q[i];
    out[l] = s;
  }
}

SliceWindow::SliceWindow(const FieldState& prev, const FieldState& mid, const FieldState& next,
                         const GaugeFrame& frame_prev, const GaugeFrame& frame_mid,
                         const GaugeFrame& frame_next, bool antisymmetrize)
    : prev_(prev),
      mid_(mid),
      next_(next),
      frame_mid_(frame_mid),
      dt_(0.5 * (next.t - prev.t)),
      a0_(connection_A0(frame_prev, frame_next, antisymmetrize)),
      q_prev_(q_components(prev, frame_prev)),
      q_mid_(q_components(mid, frame_mid)),
      q_next_(q_components(next, frame_next)) {
  if (!(prev.grid == mid.grid) || !(mid.grid == next.grid))
    throw Error(ErrorCode::FrameMismatch, "window slices use different grids");
}

GaugeResiduals gauge_residuals(const SliceWindow& w) {
  const auto& grid = w.grid();
  const int J = grid.size(), k = w.rank();
  const auto& qm = w.q_mid();
  const auto dq0 = radial_derivative(grid, qm.q0, k, Parity::Even);
  const auto dq1 = radial_derivative(grid, qm.q1, k, Parity::Odd);
  const double inv2dt = 1.0 / (2.0 * w.dt());
  std::vector<double> a_q0(k), a_q1(k);
  double s213 = 0.0, s214 = 0.0;
  for (int j = 0; j < J; ++j) {
    const double r = grid.r(j);
    std::span<const double> q0(qm.q0.data() + j * k, k), q1(qm.q1.data() + j * k, k);
    apply_connection(w.a0(), j, q0, a_q0);
    apply_connection(w.a0(), j, q1, a_q1);
    double n213 = 0.0, n214 = 0.0;
    for (int i = 0; i < k; ++i) {
      const std::size_t idx = static_cast<std::size_t>(j) * k + i;
      const double dt_q0 = (w.q_next().q0[idx] - w.q_prev().q0[idx]) * inv2dt;
      const double dt_q1 = (w.q_next().q1[idx] - w.q_prev().q1[idx]) * inv2dt;
      const double e213 = dt_q0 + a_q0[i] - (dq1[idx] + qm.q1[idx] / r);
      const double e214 = dt_q1 + a_q1[i] - dq0[idx];
      n213 += e213 * e213;
      n214 += e214 * e214;
    }
    s213 += r * n213;
    s214 += r * n214;
  }
  return {std::sqrt(s213 * grid.dr()), std::sqrt(s214 * grid.dr())};
}

}  // namespace wavemap
