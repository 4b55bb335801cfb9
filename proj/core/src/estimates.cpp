#include "wavemap/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "wavemap/error.hpp"
#include "wavemap/vec.hpp"

namespace wavemap {

namespace {

double dotk(const double* a, const double* b, int k) {
  double s = 0.0;
  for (int i = 0; i < k; ++i) s += a[i] * b[i];
  return s;
}

[[noreturn]] void bad_params(const std::string& key, const std::string& what) {
  throw ConfigError(key, what);
}

// Power weights of one exponent e on every node, computed once per window.
struct Weights {
  std::vector<double> r1e, rme, rse, rse1, rs1e, rQ, rQ1, rms;

  Weights(const RadialGrid& grid, double e, double sigma) {
    const int J = grid.size();
    for (auto* v : {&r1e, &rme, &rse, &rse1, &rs1e, &rQ, &rQ1, &rms}) v->resize(J);
    for (int j = 0; j < J; ++j) {
      const double r = grid.r(j);
      rme[j] = std::pow(r, -e);
      rms[j] = std::pow(r, -sigma);
      r1e[j] = r * rme[j];              // r^{1-e}
      rse[j] = rme[j] / rms[j];         // r^{sigma-e}
      rse1[j] = rse[j] / r;             // r^{sigma-e-1}
      rs1e[j] = rse1[j];                // r^{sigma-1-e}
      rQ1[j] = rse[j] / rms[j] / r;     // r^{2 sigma-1-e}
      rQ[j] = rQ1[j] / r;               // r^{2 sigma-2-e}
    }
  }
};

std::vector<double> cumulative_Q0_weighted(const RadialGrid& grid, std::span<const double> q1,
                                           int rank, std::span<const double> rms) {
  const int J = grid.size();
  const double dr = grid.dr();
  std::vector<double> out(static_cast<std::size_t>(J) * rank);
  std::vector<double> acc(rank, 0.0);
  for (int j = 0; j < J; ++j) {
    const double w = rms[j] * dr;
    for (int i = 0; i < rank; ++i) {
      const double f = w * q1[j * rank + i];
      out[j * rank + i] = acc[i] + 0.5 * f;
      acc[i] += f;
    }
  }
  return out;
}

// Right-hand side of the weighted balance law with exponent e at every node
// of the middle slice: the A0 terms and the sigma correction. The sigma term
// is written against q0 - q0(0) so that it stays integrable at the axis; the
// subtracted piece integrates in closed form to r^{-sigma} q0(0).
std::vector<double> balance_rhs(const SliceWindow& w, std::span<const double> Q0, const Weights& W,
                                double sigma) {
  const RadialGrid& grid = w.grid();
  const int J = grid.size();
  const int k = w.rank();
  const double dr = grid.dr();
  const auto& q0 = w.q_mid().q0;
  const auto& q1 = w.q_mid().q1;
  const MatrixField& a0 = w.a0();

  std::vector<double> axis(k);
  for (int i = 0; i < k; ++i) axis[i] = (9.0 * q0[i] - q0[k + i]) / 8.0;

  std::vector<double> out(J, 0.0);
  std::vector<double> a0q1(k), a0q0(k);
  std::vector<double> Jacc(k, 0.0), Iacc(k, 0.0);  // running sums to r_{j-1/2}
  std::vector<double> Jr(k), Ir(k);
  for (int j = 0; j < J; ++j) {
    const double r = grid.r(j);
    const double rms = W.rms[j];
    const double rms1 = rms / r;
    apply_connection(a0, j, std::span<const double>(q1.data() + j * k, k), a0q1);
    apply_connection(a0, j, std::span<const double>(q0.data() + j * k, k), a0q0);
    for (int i = 0; i < k; ++i) {
      const double fj = rms * a0q1[i];
      const double gj = rms1 * (q0[j * k + i] - axis[i]);
      Jr[i] = Jacc[i] + 0.5 * dr * fj;
      Ir[i] = Iacc[i] + 0.5 * dr * gj;
      Jacc[i] += dr * fj;
      Iacc[i] += dr * gj;
    }
    const double wse = W.rse[j];
    const double* q0j = q0.data() + j * k;
    const double* Q0j = Q0.data() + j * k;
    out[j] = 0.5 * wse * dotk(q0j, Jr.data(), k) - 0.5 * sigma * wse * dotk(q0j, Ir.data(), k) +
             0.5 * W.rme[j] * dotk(q0j, axis.data(), k) + 0.5 * wse * dotk(a0q0.data(), Q0j, k);
  }
  return out;
}

// P_{s} = 1/2 r^{1-e}|q0 + s q1|^2 + 1/2 r^{sigma-e} Q0.(q1 + s q0) + c r^{2 sigma-1-e}|Q0|^2
// with s = -1 for P_- and s = +1 for P_+.
double flux(const Weights& W, int j, const double* q0, const double* q1, const double* Q0, int k,
            double s, double c) {
  double a2 = 0.0, mix = 0.0, QQ = 0.0;
  for (int i = 0; i < k; ++i) {
    const double a = q0[i] + s * q1[i];
    a2 += a * a;
    mix += Q0[i] * (q1[i] + s * q0[i]);
    QQ += Q0[i] * Q0[i];
  }
  return 0.5 * W.r1e[j] * a2 + 0.5 * W.rse[j] * mix + c * W.rQ1[j] * QQ;
}

// d_r P_s with the power weights differentiated exactly and d_r Q0 = r^{-sigma} q1.
double flux_r(const Weights& W, int j, const double* q0, const double* q1, const double* q0r,
              const double* q1r, const double* Q0, int k, double s, double e, double sigma,
              double c) {
  double a2 = 0.0, a_ar = 0.0, mix = 0.0, mix_r = 0.0, QQ = 0.0, Qq1 = 0.0;
  const double rms = W.rms[j];
  for (int i = 0; i < k; ++i) {
    const double a = q0[i] + s * q1[i];
    const double ar = q0r[i] + s * q1r[i];
    const double b = q1[i] + s * q0[i];
    const double br = q1r[i] + s * q0r[i];
    a2 += a * a;
    a_ar += a * ar;
    mix += Q0[i] * b;
    mix_r += rms * q1[i] * b + Q0[i] * br;
    QQ += Q0[i] * Q0[i];
    Qq1 += Q0[i] * q1[i];
  }
  return 0.5 * (1.0 - e) * W.rme[j] * a2 + W.r1e[j] * a_ar +
         0.5 * (sigma - e) * W.rse1[j] * mix + 0.5 * W.rse[j] * mix_r +
         c * ((2.0 * sigma - 1.0 - e) * W.rQ[j] * QQ + 2.0 * W.rs1e[j] * Qq1);
}

double exponent_for(const EstimateParams& p, NullForm which) {
  return which == NullForm::Beta ? p.beta : p.alpha;
}

// Derivative fields of the middle slice used by the H^2 and space-time
// diagnostics, all ambient vectors with n components per node.
struct DerivativeFields {
  std::vector<double> phi_r;
  std::vector<double> psi_t, psi_r;    // psi = phi_t
  std::vector<double> hat_t, hat_r;    // hat = phi_r
};

DerivativeFields derivative_fields(const SliceWindow& w) {
  const RadialGrid& grid = w.grid();
  const int n = w.mid().dim();
  const std::size_t size = w.mid().phi.size();
  const double inv = 1.0 / (2.0 * w.dt());
  DerivativeFields d;
  d.phi_r = spatial_derivative(w.mid());
  const auto phi_r_prev = spatial_derivative(w.prev());
  const auto phi_r_next = spatial_derivative(w.next());
  d.psi_t.resize(size);
  d.hat_t.resize(size);
  for (std::size_t a = 0; a < size; ++a) {
    d.psi_t[a] = (w.next().phi_t[a] - w.prev().phi_t[a]) * inv;
    d.hat_t[a] = (phi_r_next[a] - phi_r_prev[a]) * inv;
  }
  d.psi_r = radial_derivative(grid, w.mid().phi_t, n, Parity::Even);
  d.hat_r = radial_derivative(grid, d.phi_r, n, Parity::Odd);
  return d;
}

// 4 [B(x_u, phi_v) + B(phi_u, x_v) + B'[x](phi_u, phi_v)] at node p.
void box_source(const TargetManifold& target, std::span<const double> p, const double* x,
                const double* x_t, const double* x_r, const double* phi_u, const double* phi_v,
                int n, std::span<double> out, std::vector<double>& xu, std::vector<double>& xv) {
  for (int a = 0; a < n; ++a) {
    xu[a] = 0.5 * (x_t[a] - x_r[a]);
    xv[a] = 0.5 * (x_t[a] + x_r[a]);
  }
  std::fill(out.begin(), out.end(), 0.0);
  const vec::CSpan pu(phi_u, n), pv(phi_v, n);
  target.second_fundamental_form_ambient(p, xu, pv, 4.0, out);
  target.second_fundamental_form_ambient(p, pu, xv, 4.0, out);
  target.second_fundamental_form_derivative(p, vec::CSpan(x, n), pu, pv, 4.0, out);
}

// int_0^R r^w g dr for g even and smooth at the axis. The midpoint sum is
// corrected by the leading axis terms of its Euler-Maclaurin expansion,
// zeta(-w-k, 1/2) h^{w+k+1} g^{(k)}(0)/k!, k = 0, 2, with
// zeta(s, 1/2) = (2^s - 1) zeta(s).
double axis_corrected_integral(const RadialGrid& grid, std::span<const double> g, double w) {
  double sum = weighted_integral(grid, g, w);
  const double h = grid.dr();
  // g ~ c0 + c1 r^2 + c2 r^4 through the first three nodes.
  const double x0 = grid.r(0) * grid.r(0), x1 = grid.r(1) * grid.r(1), x2 = grid.r(2) * grid.r(2);
  const double l0 = g[0] / ((x0 - x1) * (x0 - x2));
  const double l1 = g[1] / ((x1 - x0) * (x1 - x2));
  const double l2 = g[2] / ((x2 - x0) * (x2 - x1));
  const double c0 = l0 * x1 * x2 + l1 * x0 * x2 + l2 * x0 * x1;
  const double c1 = -(l0 * (x1 + x2) + l1 * (x0 + x2) + l2 * (x0 + x1));
  auto hurwitz_half = [](double s) { return (std::pow(2.0, s) - 1.0) * std::riemann_zeta(s); };
  sum -= hurwitz_half(-w) * std::pow(h, w + 1.0) * c0;
  sum -= hurwitz_half(-w - 2.0) * std::pow(h, w + 3.0) * c1;
  return sum;
}

}  // namespace

void EstimateParams::validate() const {
  if (!(sigma > 0.0)) bad_params("estimates.sigma", "sigma must be positive");
  if (!(sigma < alpha)) bad_params("estimates.sigma", "sigma must be smaller than alpha");
  if (!(beta >= 0.1 - 1e-12 && beta <= 0.25 + 1e-12))
    bad_params("estimates.beta", "beta must lie in [1/10, 1/4]");
  if (!(absorption_margin >= 0.0))
    bad_params("estimates.absorption_margin", "absorption margin must be nonnegative");
  if (quartic_active && std::fabs(2.0 - 2.0 * alpha - 3.0 * beta) > 1e-12)
    bad_params("estimates.alpha", "quartic estimate needs 2 - 2 alpha = 3 beta");
}

EstimateParams EstimateParams::with_quartic_alpha() const {
  EstimateParams p = *this;
  p.alpha = quartic_alpha();
  p.quartic_active = true;
  return p;
}

double energy(const FieldState& state) {
  const RadialGrid& grid = state.grid;
  const int J = grid.size();
  const int n = state.dim();
  const auto phi_r = spatial_derivative(state);
  double sum = 0.0;
  for (int j = 0; j < J; ++j) {
    double d = 0.0;
    for (int a = 0; a < n; ++a) {
      const double vt = state.phi_t[j * n + a];
      const double vr = phi_r[j * n + a];
      d += vt * vt + vr * vr;
    }
    sum += grid.r(j) * d;
  }
  return 0.5 * sum * grid.dr();
}

double weighted_norm_frame_free(const FieldState& state, double beta) {
  const int J = state.nodes();
  const int n = state.dim();
  const auto phi_r = spatial_derivative(state);
  std::vector<double> dens(J);
  for (int j = 0; j < J; ++j)
    dens[j] = vec::norm2(state.phi_t_at(j)) +
              vec::norm2(std::span<const double>(phi_r.data() + j * n, n));
  return weighted_integral(state.grid, dens, -beta);
}

std::vector<double> cumulative_Q0(const RadialGrid& grid, std::span<const double> q1, int rank,
                                  double sigma) {
  std::vector<double> rms(grid.size());
  for (int j = 0; j < grid.size(); ++j) rms[j] = std::pow(grid.r(j), -sigma);
  return cumulative_Q0_weighted(grid, q1, rank, rms);
}

WeightedNorms weighted_norms(const FieldState& state, const GaugeFrame& frame,
                             const EstimateParams& params) {
  params.validate();
  const RadialGrid& grid = state.grid;
  const int J = grid.size();
  const int k = frame.rank;
  const QComponents q = q_components(state, frame);
  std::vector<double> dens(J);
  for (int j = 0; j < J; ++j)
    dens[j] = dotk(&q.q0[j * k], &q.q0[j * k], k) + dotk(&q.q1[j * k], &q.q1[j * k], k);
  WeightedNorms out;
  out.W_beta = weighted_integral(grid, dens, -params.beta);
  out.Q0 = cumulative_Q0(grid, q.q1, k, params.sigma);
  out.Q.resize(out.Q0.size());
  for (int j = 0; j < J; ++j) {
    const double w = std::pow(grid.r(j), params.sigma - params.alpha);
    for (int i = 0; i < k; ++i) {
      out.Q[j * k + i] = w * out.Q0[j * k + i];
      out.Q0_sup = std::max(out.Q0_sup, std::fabs(out.Q0[j * k + i]));
    }
  }
  return out;
}

BalanceDiagnostics balance_diagnostics(const SliceWindow& w, const EstimateParams& params,
                                       NullForm which) {
  params.validate();
  const RadialGrid& grid = w.grid();
  const int J = grid.size();
  const int k = w.rank();
  const double sg = params.sigma;
  const double al = params.alpha;
  const double e = exponent_for(params, which);
  const double inv2dt = 1.0 / (2.0 * w.dt());

  const Weights Wa(grid, al, sg);
  const std::optional<Weights> We_store =
      e == al ? std::nullopt : std::optional<Weights>(std::in_place, grid, e, sg);
  const Weights& We = We_store ? *We_store : Wa;

  const auto& qp = w.q_prev();
  const auto& qm = w.q_mid();
  const auto& qn = w.q_next();
  const auto Q0p = cumulative_Q0_weighted(grid, qp.q1, k, Wa.rms);
  const auto Q0m = cumulative_Q0_weighted(grid, qm.q1, k, Wa.rms);
  const auto Q0n = cumulative_Q0_weighted(grid, qn.q1, k, Wa.rms);
  const auto q0r = radial_derivative(grid, qm.q0, k, Parity::Even);
  const auto q1r = radial_derivative(grid, qm.q1, k, Parity::Odd);
  const auto rhs_a = balance_rhs(w, Q0m, Wa, sg);
  const auto rhs_e = e == al ? rhs_a : balance_rhs(w, Q0m, We, sg);

  const double c1a = (al - sg + 1.0) / 4.0;
  const double c2a = (1.0 + al - 2.0 * sg) * (al - sg + 1.0) / 4.0;
  const double c1e = (e - sg + 1.0) / 4.0;
  const double c2e = (1.0 + e - 2.0 * sg) * (e - sg + 1.0) / 4.0;

  BalanceDiagnostics out;
  NullBalanceFields& nf = out.null_fields;
  nf.P_plus.resize(J);
  nf.P_minus.resize(J);
  nf.source.resize(J);
  double dom_minus = std::numeric_limits<double>::infinity();
  double dom_plus = std::numeric_limits<double>::infinity();
  double scale = 0.0;
  double bal = 0.0, nul = 0.0;

  for (int j = 0; j < J; ++j) {
    const std::size_t o = static_cast<std::size_t>(j) * k;
    const double* q0 = &qm.q0[o];
    const double* q1 = &qm.q1[o];
    const double* Qm = &Q0m[o];
    const double S = dotk(q0, q0, k) + dotk(q1, q1, k);
    const double QQ = dotk(Qm, Qm, k);
    const double q1q1 = dotk(q1, q1, k);
    const double q1Q = dotk(q1, Qm, k);

    // Alpha-weighted balance law, every term of the left side.
    {
      const double dt_q0q1 =
          (dotk(&qn.q0[o], &qn.q1[o], k) - dotk(&qp.q0[o], &qp.q1[o], k)) * inv2dt;
      const double dt_Q0q0 = (dotk(&Q0n[o], &qn.q0[o], k) - dotk(&Q0p[o], &qp.q0[o], k)) * inv2dt;
      const double t1 = -Wa.r1e[j] * dt_q0q1;
      const double t2 = 0.5 * (1.0 - al) * Wa.rme[j] * S +
                        Wa.r1e[j] * (dotk(q0, &q0r[o], k) + dotk(q1, &q1r[o], k));
      const double t3 = 0.5 * al * Wa.rme[j] * S;
      const double t4 = -0.5 * Wa.rse[j] * dt_Q0q0;
      const double t5 = 0.5 * ((sg - al) * Wa.rse1[j] * q1Q + Wa.rse[j] * dotk(&q1r[o], Qm, k) +
                               Wa.rme[j] * q1q1);
      const double t6 = c1a * ((2.0 * sg - 1.0 - al) * Wa.rQ[j] * QQ + 2.0 * Wa.rs1e[j] * q1Q);
      const double t7 = c2a * Wa.rQ[j] * QQ;
      bal += std::fabs(t1 + t2 + t3 + t4 + t5 + t6 + t7 - rhs_a[j]);
    }

    // Null form d_v P_- - d_u P_+ = G with exponent e.
    const double G = rhs_e[j] - 0.5 * e * We.rme[j] * S - c2e * We.rQ[j] * QQ;
    nf.source[j] = G;
    nf.P_minus[j] = flux(We, j, q0, q1, Qm, k, -1.0, c1e);
    nf.P_plus[j] = flux(We, j, q0, q1, Qm, k, +1.0, c1e);
    double dP[2], rP[2];
    for (int b = 0; b < 2; ++b) {
      const double s = b == 0 ? -1.0 : 1.0;
      dP[b] = (flux(We, j, &qn.q0[o], &qn.q1[o], &Q0n[o], k, s, c1e) -
               flux(We, j, &qp.q0[o], &qp.q1[o], &Q0p[o], k, s, c1e)) *
              inv2dt;
      rP[b] = flux_r(We, j, q0, q1, &q0r[o], &q1r[o], Qm, k, s, e, sg, c1e);
    }
    nul += std::fabs(0.5 * (dP[0] + rP[0]) - 0.5 * (dP[1] - rP[1]) - G);

    // r^{1-e}|phi_u|^2 = r^{1-e}|q0 - q1|^2 / 4, likewise phi_v with q0 + q1.
    double du = 0.0, dv = 0.0;
    for (int i = 0; i < k; ++i) {
      du += (q0[i] - q1[i]) * (q0[i] - q1[i]);
      dv += (q0[i] + q1[i]) * (q0[i] + q1[i]);
    }
    du *= 0.25 * We.r1e[j];
    dv *= 0.25 * We.r1e[j];
    scale = std::max({scale, du, dv});
    constexpr double tiny = 1e-300;
    if (du > tiny) dom_minus = std::min(dom_minus, nf.P_minus[j] / du);
    if (dv > tiny) dom_plus = std::min(dom_plus, nf.P_plus[j] / dv);
  }
  nf.domination_minus = std::isfinite(dom_minus) ? dom_minus : 0.0;
  nf.domination_plus = std::isfinite(dom_plus) ? dom_plus : 0.0;
  out.balance_residual = bal * grid.dr();
  out.null_residual = nul * grid.dr();

  const double floor = -params.absorption_margin * scale - 1e-13 * scale;
  for (int j = 0; j < J; ++j) {
    if (nf.P_minus[j] < floor || nf.P_plus[j] < floor) {
      std::ostringstream os;
      os << "null flux negative at r = " << grid.r(j) << " (P- = " << nf.P_minus[j]
         << ", P+ = " << nf.P_plus[j] << ")";
      throw Error(ErrorCode::NegativeFlux, os.str());
    }
  }
  return out;
}

double balance_residual(const SliceWindow& w, const EstimateParams& params) {
  return balance_diagnostics(w, params).balance_residual;
}

NullBalanceFields null_balance_fields(const SliceWindow& w, const EstimateParams& params,
                                      NullForm which) {
  return balance_diagnostics(w, params, which).null_fields;
}

double null_balance_residual(const SliceWindow& w, const EstimateParams& params, NullForm which) {
  return balance_diagnostics(w, params, which).null_residual;
}

NonlinearDensities nonlinear_densities(const SliceWindow& w, const EstimateParams& params) {
  const RadialGrid& grid = w.grid();
  const FieldState& mid = w.mid();
  const TargetManifold& target = mid.target;
  const int J = grid.size();
  const int n = mid.dim();
  const double be = params.beta;
  const double qa = params.quartic_alpha();
  const DerivativeFields d = derivative_fields(w);
  const bool curved = target.kind() != TargetKind::Flat;

  NonlinearDensities out;
  for (auto* v : {&out.g1, &out.g2, &out.bilinear, &out.quartic, &out.G1, &out.G1_tilde,
                  &out.G_hat_alpha, &out.phi_u2, &out.phi_v2, &out.psi_u2, &out.psi_v2,
                  &out.phi_t2, &out.phi_r2, &out.E1})
    v->assign(J, 0.0);

  std::vector<double> pu(n), pv(n), su(n), sv(n), box(n), xu(n), xv(n);
  for (int j = 0; j < J; ++j) {
    const double r = grid.r(j);
    const std::size_t o = static_cast<std::size_t>(j) * n;
    const double* pt = &mid.phi_t[o];
    const double* pr = &d.phi_r[o];
    for (int a = 0; a < n; ++a) {
      pu[a] = 0.5 * (pt[a] - pr[a]);
      pv[a] = 0.5 * (pt[a] + pr[a]);
      su[a] = 0.5 * (d.psi_t[o + a] - d.psi_r[o + a]);
      sv[a] = 0.5 * (d.psi_t[o + a] + d.psi_r[o + a]);
    }
    const double npu = vec::norm(pu), npv = vec::norm(pv);
    const double nsu = vec::norm(su), nsv = vec::norm(sv);
    const double npsi = std::sqrt(dotk(pt, pt, n));
    const double npsi_t = std::sqrt(dotk(&d.psi_t[o], &d.psi_t[o], n));

    out.phi_u2[j] = npu * npu;
    out.phi_v2[j] = npv * npv;
    out.psi_u2[j] = nsu * nsu;
    out.psi_v2[j] = nsv * nsv;
    out.phi_t2[j] = npsi * npsi;
    out.phi_r2[j] = dotk(pr, pr, n);
    // g1, g2 bound |G1| through |B'| and |B''|, which vanish on a flat target.
    if (curved) {
      out.g1[j] = npsi * npsi * (nsu * npv + npu * nsv) * r;
      out.g2[j] = npsi_t * npsi * npu * npv * r;
    }
    out.bilinear[j] = std::pow(r, 2.0 - be) * (npu * npu * nsv * nsv + nsu * nsu * npv * npv);
    out.quartic[j] = std::pow(r, 3.0 * be) * npu * npu * npv * npv;
    out.G_hat_alpha[j] = (1.0 - qa) * std::pow(r, -qa) * (npv * npv - npu * npu);
    const double ea = dotk(&d.psi_t[o], &d.psi_t[o], n) + dotk(&d.psi_r[o], &d.psi_r[o], n);
    const double eb = dotk(&d.hat_t[o], &d.hat_t[o], n) + dotk(&d.hat_r[o], &d.hat_r[o], n) +
                      out.phi_r2[j] / (r * r);
    out.E1[j] = 0.5 * (ea + eb) * r;

    if (curved) {
      const auto p = mid.phi_at(j);
      box_source(target, p, pt, &d.psi_t[o], &d.psi_r[o], pu.data(), pv.data(), n, box, xu, xv);
      out.G1[j] = r * dotk(&d.psi_t[o], box.data(), n);
      box_source(target, p, pr, &d.hat_t[o], &d.hat_r[o], pu.data(), pv.data(), n, box, xu, xv);
      out.G1_tilde[j] = r * dotk(&d.hat_t[o], box.data(), n);
    }
  }
  return out;
}

H2Report h2_from_densities(const NonlinearDensities& d, double dr) {
  H2Report out;
  for (std::size_t j = 0; j < d.E1.size(); ++j) {
    out.E1 += d.E1[j];
    out.G1_abs += std::fabs(d.G1[j]);
    out.G1_tilde_abs += std::fabs(d.G1_tilde[j]);
  }
  out.E1 *= dr;
  out.G1_abs *= dr;
  out.G1_tilde_abs *= dr;
  return out;
}

H2Report h2_energy(const SliceWindow& w) {
  return h2_from_densities(nonlinear_densities(w, EstimateParams{}), w.grid().dr());
}

std::vector<GaugeFrame> build_frames(const Trajectory& trajectory) {
  std::vector<GaugeFrame> frames;
  frames.reserve(trajectory.snapshots.size());
  for (const FieldState& s : trajectory.snapshots)
    frames.push_back(build_frame(s, frames.empty() ? nullptr : &frames.back()));
  return frames;
}

NonlinearIntegrals nonlinear_integrals(const Trajectory& trajectory,
                                       std::span<const GaugeFrame> frames,
                                       const EstimateParams& params) {
  params.validate();
  const auto& snaps = trajectory.snapshots;
  if (frames.size() != snaps.size())
    throw Error(ErrorCode::FrameMismatch, "one frame per snapshot is required");
  NonlinearIntegrals out;
  for (std::size_t i = 1; i + 1 < snaps.size(); ++i) {
    const SliceWindow w(snaps[i - 1], snaps[i], snaps[i + 1], frames[i - 1], frames[i],
                        frames[i + 1]);
    const NonlinearDensities dens = nonlinear_densities(w, params);
    const double cell = w.grid().dr() * w.dt();
    double g1 = 0.0, g2 = 0.0, bl = 0.0, qu = 0.0;
    for (std::size_t j = 0; j < dens.g1.size(); ++j) {
      g1 += dens.g1[j];
      g2 += dens.g2[j];
      bl += dens.bilinear[j];
      qu += dens.quartic[j];
    }
    out.g1_int += g1 * cell;
    out.g2_int += g2 * cell;
    out.bilinear += bl * cell;
    out.quartic += qu * cell;
  }
  return out;
}

SobolevHardySides sobolev_hardy_sides(const RadialGrid& grid, std::span<const double> profile,
                                      double beta) {
  const int J = grid.size();
  const double h = grid.dr();
  // Fourth-order centered derivative; even reflection across the axis and a
  // profile that vanishes at the outer edge.
  auto at = [&](int j) -> double {
    if (j < 0) return profile[-j - 1];
    if (j >= J) return 0.0;
    return profile[j];
  };
  std::vector<double> p4(J), p2(J), d2(J);
  for (int j = 0; j < J; ++j) {
    const double d = (at(j - 2) - 8.0 * at(j - 1) + 8.0 * at(j + 1) - at(j + 2)) / (12.0 * h);
    p2[j] = profile[j] * profile[j];
    p4[j] = p2[j] * p2[j];
    d2[j] = d * d;
  }
  SobolevHardySides s;
  s.lhs = axis_corrected_integral(grid, p4, beta);
  const double a = axis_corrected_integral(grid, p2, -beta);
  const double b = axis_corrected_integral(grid, p2, 1.0);
  const double c = axis_corrected_integral(grid, d2, 1.0);
  s.rhs = a * std::pow(b, beta) * std::pow(c, 1.0 - beta);
  return s;
}

double sobolev_hardy_ratio(const RadialGrid& grid, std::span<const double> profile, double beta) {
  const SobolevHardySides s = sobolev_hardy_sides(grid, profile, beta);
  if (!(s.rhs > 0.0))
    throw Error(ErrorCode::DegenerateProfile, "profile vanishes; ratio undefined");
  return s.lhs / s.rhs;
}

}  // namespace wavemap
