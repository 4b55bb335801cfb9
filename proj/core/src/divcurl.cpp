#include "wavemap/divcurl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "wavemap/error.hpp"

namespace wavemap {

namespace {

int lattice_count(double length, double h) {
  const double c = length / h;
  const double rc = std::round(c);
  if (std::fabs(c - rc) > 1e-9 * std::max(1.0, c))
    throw Error(ErrorCode::BadResolution, "lattice step must divide T and X");
  return static_cast<int>(rc);
}

// Trapezoid sum of F over consecutive lattice nodes, step `step`.
template <class At>
double trapezoid(int lo, int hi, double step, At at) {
  if (hi <= lo) return 0.0;
  double s = 0.5 * (at(lo) + at(hi));
  for (int k = lo + 1; k < hi; ++k) s += at(k);
  return s * step;
}

}  // namespace

DivCurlField::DivCurlField(double T_, double X_, double h_) : T(T_), h(h_), X(X_) {
  if (!(T_ > 0.0) || !(X_ >= 0.0) || !(h_ > 0.0))
    throw Error(ErrorCode::BadResolution, "lattice needs T > 0, X >= 0, h > 0");
  m = lattice_count(T_, h_);
  a = lattice_count(X_, h_);
  if (m < 1) throw Error(ErrorCode::BadResolution, "lattice needs at least one cell per T");
  nu = a + m;
  nv = a + 2 * m;
  const std::size_t nodes = static_cast<std::size_t>(nu + 1) * (nv + 1);
  const std::size_t cells = static_cast<std::size_t>(nu) * nv;
  F11.assign(nodes, 0.0);
  F12.assign(nodes, 0.0);
  F21.assign(nodes, 0.0);
  F22.assign(nodes, 0.0);
  G1.assign(cells, 0.0);
  G2.assign(cells, 0.0);
}

double DivCurlField::cell_weight(int i, int l) const {
  const int s = i + l;
  const int d = l - i;
  double wt = 0.0;
  if (s >= a && s + 2 <= a + 2 * m) wt = 1.0;
  else if (s == a - 1 || s == a + 2 * m - 1) wt = 0.5;
  double wr = 0.0;
  if (d - 1 >= -a) wr = 1.0;
  else if (d == -a) wr = 0.5;
  return wt * wr;
}

void DivCurlField::define_sources() {
  const double inv = 1.0 / (2.0 * h);
  for (int i = 0; i < nu; ++i)
    for (int l = 0; l < nv; ++l) {
      const std::size_t c = cell(i, l);
      const std::size_t n00 = node(i, l), n10 = node(i + 1, l), n01 = node(i, l + 1),
                        n11 = node(i + 1, l + 1);
      auto du = [&](const std::vector<double>& F) { return (F[n10] + F[n11] - F[n00] - F[n01]) * inv; };
      auto dv = [&](const std::vector<double>& F) { return (F[n01] + F[n11] - F[n00] - F[n10]) * inv; };
      G1[c] = du(F11) + dv(F12);
      G2[c] = du(F21) - dv(F22);
    }
}

InvariantReport check_invariants(const DivCurlField& f) {
  InvariantReport rep;
  for (int i = 0; i <= f.nu; ++i)
    for (int l = 0; l <= f.nv; ++l) {
      if (!f.inside(i, l)) continue;
      const std::size_t n = f.node(i, l);
      rep.min_flux = std::min({rep.min_flux, f.F11[n], f.F12[n], f.F21[n], f.F22[n]});
      if (l - i == -f.a)
        rep.axis_residual = std::max({rep.axis_residual, std::fabs(f.F11[n] - f.F12[n]),
                                      std::fabs(f.F21[n] + f.F22[n])});
    }
  const double inv = 1.0 / (2.0 * f.h);
  for (int i = 0; i < f.nu; ++i)
    for (int l = 0; l < f.nv; ++l) {
      if (f.cell_weight(i, l) == 0.0) continue;
      const std::size_t c = f.cell(i, l);
      const std::size_t n00 = f.node(i, l), n10 = f.node(i + 1, l), n01 = f.node(i, l + 1),
                        n11 = f.node(i + 1, l + 1);
      auto du = [&](const std::vector<double>& F) { return (F[n10] + F[n11] - F[n00] - F[n01]) * inv; };
      auto dv = [&](const std::vector<double>& F) { return (F[n01] + F[n11] - F[n00] - F[n10]) * inv; };
      rep.pde_residual = std::max({rep.pde_residual, std::fabs(du(f.F11) + dv(f.F12) - f.G1[c]),
                                   std::fabs(du(f.F21) - dv(f.F22) - f.G2[c])});
    }
  return rep;
}

InvariantReport require_invariants(const DivCurlField& f) {
  const InvariantReport rep = check_invariants(f);
  std::ostringstream os;
  if (rep.min_flux < -f.nonneg_tolerance)
    os << "negative flux density " << rep.min_flux << "; ";
  if (rep.axis_residual > f.axis_tolerance)
    os << "axis condition violated by " << rep.axis_residual << "; ";
  if (rep.pde_residual > f.pde_tolerance)
    os << "balance laws violated by " << rep.pde_residual << "; ";
  if (!os.str().empty()) throw Error(ErrorCode::InvariantViolation, os.str());
  return rep;
}

double slice_integral(const DivCurlField& f, const std::vector<double>& Fa,
                      const std::vector<double>& Fb, bool final_slice) {
  // t = 0: i + l = a, r = (a - i) h.  t = T: i + l = a + 2m, r = (a + m - i) h.
  const int sum = final_slice ? f.a + 2 * f.m : f.a;
  const int hi = final_slice ? f.nu : f.a;
  return trapezoid(0, hi, f.h, [&](int i) {
    const std::size_t n = f.node(i, sum - i);
    return Fa[n] + Fb[n];
  });
}

double source_integral(const DivCurlField& f, const std::vector<double>& G) {
  double s = 0.0;
  for (int i = 0; i < f.nu; ++i)
    for (int l = 0; l < f.nv; ++l) {
      const double w = f.cell_weight(i, l);
      if (w != 0.0) s += w * std::fabs(G[f.cell(i, l)]);
    }
  return 0.5 * f.h * f.h * s;
}

double sup_along_v(const DivCurlField& f, const std::vector<double>& F) {
  double best = 0.0;
  for (int i = 0; i <= f.nu; ++i) {
    const int lo = std::max(f.a - i, i - f.a);
    const int hi = std::min(f.a + 2 * f.m - i, f.nv);
    best = std::max(best, trapezoid(lo, hi, 0.5 * f.h, [&](int l) { return F[f.node(i, l)]; }));
  }
  return best;
}

double sup_along_u(const DivCurlField& f, const std::vector<double>& F) {
  double best = 0.0;
  for (int l = 0; l <= f.nv; ++l) {
    const int lo = std::max(f.a - l, 0);
    const int hi = std::min({l + f.a, f.a + 2 * f.m - l, f.nu});
    best = std::max(best, trapezoid(lo, hi, 0.5 * f.h, [&](int i) { return F[f.node(i, l)]; }));
  }
  return best;
}

double safe_ratio(double lhs, double rhs) {
  if (rhs > 0.0) return lhs / rhs;
  return lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

FluxBounds flux_bounds(const DivCurlField& f) {
  require_invariants(f);
  FluxBounds b;
  b.lhs1 = sup_along_v(f, f.F11) + sup_along_u(f, f.F12);
  b.rhs1 = slice_integral(f, f.F11, f.F12, false) + source_integral(f, f.G1);
  b.lhs2 = sup_along_v(f, f.F21) + sup_along_u(f, f.F22);
  b.rhs2 = slice_integral(f, f.F21, f.F22, true) + slice_integral(f, f.F21, f.F22, false) +
           source_integral(f, f.G2);
  b.ratio1 = safe_ratio(b.lhs1, b.rhs1);
  b.ratio2 = safe_ratio(b.lhs2, b.rhs2);
  return b;
}

BilinearBound bilinear_bound(const DivCurlField& f) {
  const FluxBounds fb = flux_bounds(f);
  BilinearBound b;
  double s = 0.0;
  for (int i = 0; i < f.nu; ++i)
    for (int l = 0; l < f.nv; ++l) {
      const double w = f.cell_weight(i, l);
      if (w == 0.0) continue;
      // Average of the product over the cell corners that lie in the region.
      double acc = 0.0;
      int count = 0;
      for (int di = 0; di < 2; ++di)
        for (int dl = 0; dl < 2; ++dl) {
          if (!f.inside(i + di, l + dl)) continue;
          const std::size_t n = f.node(i + di, l + dl);
          acc += f.F11[n] * f.F22[n] + f.F12[n] * f.F21[n];
          ++count;
        }
      s += w * acc / count;
    }
  b.lhs = 0.5 * f.h * f.h * s;
  b.rhs = fb.rhs1 * fb.rhs2;
  b.ratio = safe_ratio(b.lhs, b.rhs);
  return b;
}

namespace {

// tau(u, v) sum_k c_k cos(w_k u + n_k v + p_k)
struct RandomSmooth {
  std::vector<double> c, w, n, p;
  double T = 1.0;

  RandomSmooth(std::mt19937_64& rng, int modes, double T_) : T(T_) {
    std::uniform_real_distribution<double> freq(-2.0 * std::numbers::pi / T_, 2.0 * std::numbers::pi / T_);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    for (int k = 0; k < modes; ++k) {
      c.push_back(amp(rng) / std::sqrt(static_cast<double>(modes)));
      w.push_back(freq(rng));
      n.push_back(freq(rng));
      p.push_back(phase(rng));
    }
  }

  double operator()(double u, double v) const {
    const double su = std::sin(std::numbers::pi * (u + T) / (4.0 * T));
    const double cv = std::cos(std::numbers::pi * v / (4.0 * T));
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * std::cos(w[k] * u + n[k] * v + p[k]);
    return su * su * cv * cv * s;
  }
};

}  // namespace

DivCurlField synthesize_field(std::uint64_t seed, int cells, int modes, double T) {
  if (cells < 1) throw Error(ErrorCode::BadResolution, "need at least one cell");
  DivCurlField f(T, T, T / cells);
  if (modes <= 0) return f;
  std::mt19937_64 rng(seed);
  const RandomSmooth s(rng, modes, T), p(rng, modes, T), q(rng, modes, T), mm(rng, modes, T),
      nn(rng, modes, T);
  for (int i = 0; i <= f.nu; ++i)
    for (int l = 0; l <= f.nv; ++l) {
      const double u = f.u(i), v = f.v(l);
      const double d = v - u;
      const double sv = s(u, v);
      const std::size_t k = f.node(i, l);
      f.F11[k] = std::pow(sv + d * p(u, v), 2);
      f.F12[k] = std::pow(sv + d * q(u, v), 2);
      f.F21[k] = std::pow(d * mm(u, v), 2);
      f.F22[k] = std::pow(d * nn(u, v), 2);
    }
  f.define_sources();
  const double scale = std::max(1.0, *std::max_element(f.F11.begin(), f.F11.end()));
  f.pde_tolerance = 1e-12 * scale / f.h;
  return f;
}

DivCurlField bump_field(int cells, double T) {
  if (cells < 1) throw Error(ErrorCode::BadResolution, "need at least one cell");
  DivCurlField f(T, T, T / cells);
  const double pi = std::numbers::pi;
  auto phi = [&](double r) { return r < 0.5 * T ? std::pow(std::cos(pi * r / T), 4) : 0.0; };
  auto A = [&](double v) { return v > T && v < 2.0 * T ? std::pow(std::sin(pi * (v - T) / T), 4) : 0.0; };
  auto B = [&](double u) { return u > -T && u < 0.0 ? std::pow(std::sin(pi * u / T), 4) : 0.0; };
  for (int i = 0; i <= f.nu; ++i)
    for (int l = 0; l <= f.nv; ++l) {
      const std::size_t k = f.node(i, l);
      const double r = std::fabs(0.5 * (f.v(l) - f.u(i)));
      f.F11[k] = f.F12[k] = phi(r);
      f.F21[k] = A(f.v(l));
      f.F22[k] = B(f.u(i));
    }
  f.define_sources();
  return f;
}

namespace {

// Nodal radial profiles of every lattice quantity on interior snapshots.
struct RadialSeries {
  std::vector<std::vector<double>> F11, F12, F21, F22, G1, G2;
};

double sample(const RadialGrid& grid, const std::vector<double>& prof, double r, bool vanish_at_axis) {
  const double dr = grid.dr();
  const int J = grid.size();
  const double x = r / dr - 0.5;
  if (x < 0.0) {
    if (!vanish_at_axis) return prof[0];
    return prof[0] * (r / grid.r(0));
  }
  const int j = static_cast<int>(x);
  if (j >= J - 1) return x > J - 1 ? 0.0 : prof[J - 1];
  const double w = x - j;
  return (1.0 - w) * prof[j] + w * prof[j + 1];
}

}  // namespace

DivCurlField fields_from_solution(const Trajectory& trajectory, std::span<const GaugeFrame> frames,
                                  const EstimateParams& params, SolutionPair pair, int stride) {
  params.validate();
  const auto& snaps = trajectory.snapshots;
  if (snaps.size() < 4) throw Error(ErrorCode::BadResolution, "need a densely saved trajectory");
  if (frames.size() != snaps.size())
    throw Error(ErrorCode::FrameMismatch, "one frame per snapshot is required");
  if (stride < 1) throw Error(ErrorCode::BadResolution, "stride must be positive");
  const RadialGrid& grid = snaps.front().grid;
  const int J = grid.size();
  const double dt = snaps[1].t - snaps[0].t;
  const std::size_t N = snaps.size();

  // Time differencing needs neighbours, so the lattice spans t_1 .. t_{N-2}.
  const double t0 = snaps[1].t;
  const double h = stride * grid.dr();
  const int m = static_cast<int>(std::floor((snaps[N - 2].t - t0) / h + 1e-9));
  const int a = static_cast<int>(std::floor((grid.r_max() - grid.dr() - m * h) / h + 1e-9));
  if (m < 1 || a < 1) throw Error(ErrorCode::BadResolution, "run too short or grid too small for the lattice");

  RadialSeries series;
  for (auto* s : {&series.F11, &series.F12, &series.F21, &series.F22, &series.G1, &series.G2})
    s->resize(N);
  const double be = params.beta;
  for (std::size_t n = 1; n + 1 < N; ++n) {
    const SliceWindow w(snaps[n - 1], snaps[n], snaps[n + 1], frames[n - 1], frames[n], frames[n + 1]);
    const NonlinearDensities d = nonlinear_densities(w, params);
    auto& f11 = series.F11[n];
    auto& f12 = series.F12[n];
    auto& f21 = series.F21[n];
    auto& f22 = series.F22[n];
    auto& g1 = series.G1[n];
    auto& g2 = series.G2[n];
    f11.resize(J);
    f12.resize(J);
    g1.resize(J);
    for (int j = 0; j < J; ++j) {
      const double r = grid.r(j);
      f11[j] = r * d.psi_v2[j];
      f12[j] = r * d.psi_u2[j];
      g1[j] = 0.5 * d.G1[j];
    }
    if (pair == SolutionPair::NullFlux) {
      NullBalanceFields nf = null_balance_fields(w, params, NullForm::Beta);
      f21 = std::move(nf.P_plus);
      f22 = std::move(nf.P_minus);
      g2.resize(J);
      for (int j = 0; j < J; ++j) g2[j] = -nf.source[j];
    } else {
      f21.resize(J);
      f22.resize(J);
      g2.resize(J);
      for (int j = 0; j < J; ++j) {
        const double r = grid.r(j);
        const double wr = std::pow(r, 1.0 - be);
        f21[j] = wr * d.phi_v2[j];
        f22[j] = wr * d.phi_u2[j];
        g2[j] = std::pow(r, -be) *
                (0.5 * d.phi_r2[j] - 0.25 * (1.0 - be) * (d.phi_t2[j] + d.phi_r2[j]));
      }
    }
  }

  DivCurlField f(m * h, a * h, h);
  auto interp = [&](const std::vector<std::vector<double>>& s, double t, double r, bool vanish) {
    double x = (t - snaps[0].t) / dt;
    int n = static_cast<int>(std::floor(x));
    n = std::clamp(n, 1, static_cast<int>(N) - 3);
    const double w = std::clamp(x - n, 0.0, 1.0);
    const double lo = sample(grid, s[n], r, vanish);
    const double hi = sample(grid, s[n + 1], r, vanish);
    return (1.0 - w) * lo + w * hi;
  };
  for (int i = 0; i <= f.nu; ++i)
    for (int l = 0; l <= f.nv; ++l) {
      if (!f.inside(i, l)) continue;
      const double t = t0 + f.t_of(i, l);
      const double r = f.r_of(i, l);
      const std::size_t k = f.node(i, l);
      f.F11[k] = interp(series.F11, t, r, true);
      f.F12[k] = interp(series.F12, t, r, true);
      f.F21[k] = interp(series.F21, t, r, true);
      f.F22[k] = interp(series.F22, t, r, true);
    }
  for (int i = 0; i < f.nu; ++i)
    for (int l = 0; l < f.nv; ++l) {
      if (f.cell_weight(i, l) == 0.0) continue;
      const double t = t0 + 0.5 * (i + l + 1 - a) * h;
      const double r = std::max(0.0, 0.5 * (l - i + a) * h);
      const std::size_t c = f.cell(i, l);
      f.G1[c] = interp(series.G1, t, r, false);
      f.G2[c] = interp(series.G2, t, r, false);
    }
  // Resampled fields satisfy the balance laws only up to truncation error;
  // the residual is reported by check_invariants rather than enforced.
  f.pde_tolerance = std::numeric_limits<double>::infinity();
  return f;
}

}  // namespace wavemap
