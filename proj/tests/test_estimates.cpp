#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "wavemap/error.hpp"

using namespace wavemap;
using namespace testing_support;

namespace {

// Straight double loop over slices and nodes, every density written out.
NonlinearIntegrals brute_force_integrals(const Run& run, const EstimateParams& P) {
  NonlinearIntegrals out;
  const auto& snaps = run.traj.snapshots;
  const double dt = run.traj.dt;
  for (std::size_t i = 1; i + 1 < snaps.size(); ++i) {
    const FieldState& m = snaps[i];
    const RadialGrid& g = m.grid;
    const int n = m.dim();
    const auto phi_r = spatial_derivative(m);
    const auto psi_r = radial_derivative(g, m.phi_t, n, Parity::Even);
    for (int j = 0; j < g.size(); ++j) {
      double pu = 0, pv = 0, su = 0, sv = 0, ps = 0, pst = 0;
      for (int a = 0; a < n; ++a) {
        const std::size_t k = static_cast<std::size_t>(j) * n + a;
        const double psi_t = (snaps[i + 1].phi_t[k] - snaps[i - 1].phi_t[k]) / (2 * dt);
        pu += std::pow(0.5 * (m.phi_t[k] - phi_r[k]), 2);
        pv += std::pow(0.5 * (m.phi_t[k] + phi_r[k]), 2);
        su += std::pow(0.5 * (psi_t - psi_r[k]), 2);
        sv += std::pow(0.5 * (psi_t + psi_r[k]), 2);
        ps += m.phi_t[k] * m.phi_t[k];
        pst += psi_t * psi_t;
      }
      const double r = g.r(j);
      if (m.target.kind() != TargetKind::Flat) {
        out.g1_int += ps * (std::sqrt(su * pv) + std::sqrt(pu * sv)) * r;
        out.g2_int += std::sqrt(pst * ps * pu * pv) * r;
      }
      out.bilinear += std::pow(r, 2 - P.beta) * (pu * sv + su * pv);
      out.quartic += std::pow(r, 3 * P.beta) * pu * pv;
    }
  }
  const double cell = snaps[0].grid.dr() * dt;
  out.g1_int *= cell;
  out.g2_int *= cell;
  out.bilinear *= cell;
  out.quartic *= cell;
  return out;
}

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

}  // namespace

TEST_SUITE("estimates") {

TEST_CASE("parameter validation") {
  EstimateParams p;
  CHECK_NOTHROW(p.validate());
  p.sigma = 0.3;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.beta = 0.3;
  try {
    p.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "estimates.beta");
  }
  p = {};
  p.quartic_active = true;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  const EstimateParams q = EstimateParams{}.with_quartic_alpha();
  CHECK(q.alpha == doctest::Approx(0.7));
  CHECK_NOTHROW(q.validate());
}

TEST_CASE("energy") {
  const RadialGrid g(1.0 / 128, 8.0);
  CHECK(energy(init_state(InitialData{}, g, TargetManifold::unit_sphere(), 1.0)) == 0.0);
  const double e1 = energy(init_state(bump(DataFamily::GaussianBump, 1.0, 1.0), g,
                                      TargetManifold::flat(3), 1.0));
  CHECK(e1 == doctest::Approx(0.125).epsilon(1e-5));
}

TEST_CASE("Q0 of a constant") {
  const double c = 0.7;
  double prev = 0.0;
  for (int level = 0; level < 3; ++level) {
    const RadialGrid g(std::ldexp(1.0, -5 - level), 2.0);
    std::vector<double> q1(g.size(), c);
    const auto Q0 = cumulative_Q0(g, q1, 1, 0.01);
    double err = 0.0;
    for (int j = 0; j < g.size(); ++j)
      err = std::max(err, std::fabs(Q0[j] - c * std::pow(g.r(j), 0.99) / 0.99));
    CHECK(err < 2 * g.dr());
    if (level > 0) CHECK(err < prev);
    prev = err;
  }
  const RadialGrid g(1.0 / 16, 1.0);
  std::vector<double> zero(2 * g.size(), 0.0);
  for (double x : cumulative_Q0(g, zero, 2, 0.01)) CHECK(x == 0.0);
}

TEST_CASE("weighted norm is gauge invariant") {
  const Run run = dense_run(TargetManifold::unit_sphere(), bump(DataFamily::RingBump, 0.3, 0.7),
                            1.0 / 32, 8.0, 0.5);
  const EstimateParams P;
  for (std::size_t i : {std::size_t(0), run.traj.snapshots.size() - 1}) {
    const WeightedNorms wn = weighted_norms(run.traj.snapshots[i], run.frames[i], P);
    const double ff = weighted_norm_frame_free(run.traj.snapshots[i], P.beta);
    CHECK(std::fabs(wn.W_beta - ff) <= 1e-9 * ff);
    CHECK(wn.W_beta > 0.0);
    CHECK(wn.Q0_sup > 0.0);
  }
  const Run zero = dense_run(TargetManifold::unit_sphere(), InitialData{}, 1.0 / 16, 4.0, 0.25);
  const WeightedNorms wz = weighted_norms(zero.traj.snapshots[0], zero.frames[0], P);
  CHECK(wz.W_beta == 0.0);
  CHECK(wz.Q0_sup == 0.0);
}

TEST_CASE("balance laws vanish on zero data") {
  const Run run = dense_run(TargetManifold::unit_sphere(), InitialData{}, 1.0 / 16, 4.0, 0.25);
  const SliceWindow w = run.window(1);
  const EstimateParams P;
  const BalanceDiagnostics bd = balance_diagnostics(w, P);
  CHECK(bd.balance_residual == 0.0);
  CHECK(bd.null_residual == 0.0);
  for (double x : bd.null_fields.P_plus) CHECK(x == 0.0);
  for (double x : bd.null_fields.P_minus) CHECK(x == 0.0);
  for (double x : bd.null_fields.source) CHECK(x == 0.0);
  const H2Report h2 = h2_energy(w);
  CHECK(h2.E1 == 0.0);
  CHECK(h2.G1_abs == 0.0);
  const NonlinearIntegrals ni = nonlinear_integrals(run.traj, run.frames, P);
  CHECK(ni.g1_int == 0.0);
  CHECK(ni.g2_int == 0.0);
  CHECK(ni.bilinear == 0.0);
  CHECK(ni.quartic == 0.0);
}

TEST_CASE("null fluxes written out") {
  const Run run = dense_run(TargetManifold::unit_sphere(), bump(DataFamily::RingBump, 0.3, 0.7),
                            1.0 / 32, 8.0, 0.5);
  const SliceWindow w = run.window(4);
  const EstimateParams P;
  const NullBalanceFields nf = null_balance_fields(w, P, NullForm::Beta);
  const auto& q = w.q_mid();
  const int k = w.rank();
  const auto Q0 = cumulative_Q0(w.grid(), q.q1, k, P.sigma);
  const auto phi_r = spatial_derivative(w.mid());
  const double b = P.beta, s = P.sigma, c = (b - s + 1) / 4;
  for (int j = 0; j < w.grid().size(); j += 7) {
    const double r = w.grid().r(j);
    double am = 0, ap = 0, mm = 0, mp = 0, QQ = 0, fu = 0, fv = 0;
    for (int i = 0; i < k; ++i) {
      const double q0 = q.q0[j * k + i], q1 = q.q1[j * k + i], Q = Q0[j * k + i];
      am += (q0 - q1) * (q0 - q1);
      ap += (q0 + q1) * (q0 + q1);
      mm += Q * (q1 - q0);
      mp += Q * (q1 + q0);
      QQ += Q * Q;
    }
    for (int a = 0; a < 3; ++a) {
      fu += std::pow(0.5 * (w.mid().phi_t_at(j)[a] - phi_r[j * 3 + a]), 2);
      fv += std::pow(0.5 * (w.mid().phi_t_at(j)[a] + phi_r[j * 3 + a]), 2);
    }
    // the quadratic parts are 2 r^{1-beta}|phi_u|^2 and 2 r^{1-beta}|phi_v|^2
    CHECK(0.5 * am == doctest::Approx(2 * fu).epsilon(1e-10));
    CHECK(0.5 * ap == doctest::Approx(2 * fv).epsilon(1e-10));
    const double Pm = 0.5 * std::pow(r, 1 - b) * am + 0.5 * std::pow(r, s - b) * mm +
                      c * std::pow(r, 2 * s - 1 - b) * QQ;
    const double Pp = 0.5 * std::pow(r, 1 - b) * ap + 0.5 * std::pow(r, s - b) * mp +
                      c * std::pow(r, 2 * s - 1 - b) * QQ;
    CHECK(nf.P_minus[j] == doctest::Approx(Pm).epsilon(1e-12));
    CHECK(nf.P_plus[j] == doctest::Approx(Pp).epsilon(1e-12));
  }
  CHECK(nf.domination_minus > 0.5);
  CHECK(nf.domination_plus > 0.5);
  // the fused pass agrees with the single-purpose entry points
  const BalanceDiagnostics bd = balance_diagnostics(w, P, NullForm::Alpha);
  CHECK(bd.balance_residual == balance_residual(w, P));
  CHECK(bd.null_residual == null_balance_residual(w, P, NullForm::Alpha));
}

TEST_CASE("balance and null residuals converge at first order or better") {
  const EstimateParams P;
  for (TargetKind kind : {TargetKind::Flat, TargetKind::UnitSphere}) {
    CAPTURE(to_string(kind));
    const TargetManifold N =
        kind == TargetKind::Flat ? TargetManifold::flat(3) : TargetManifold::unit_sphere();
    const InitialData d = kind == TargetKind::Flat ? bump(DataFamily::GaussianBump, 0.5, 0.7)
                                                   : bump(DataFamily::RingBump, 0.3, 0.7);
    std::vector<double> bal, nb, na;
    for (int level = 0; level < 3; ++level) {
      const Run run = dense_run(N, d, std::ldexp(1.0, -4 - level), 8.0, 1.0);
      bal.push_back(integrate_windows(run, [&](const SliceWindow& w) { return balance_residual(w, P); }));
      nb.push_back(integrate_windows(
          run, [&](const SliceWindow& w) { return null_balance_residual(w, P, NullForm::Beta); }));
      na.push_back(integrate_windows(
          run, [&](const SliceWindow& w) { return null_balance_residual(w, P, NullForm::Alpha); }));
    }
    for (int i = 0; i < 2; ++i) {
      CHECK(order(bal[i], bal[i + 1]) >= 1.0);
      CHECK(order(nb[i], nb[i + 1]) >= 1.0);
      CHECK(order(na[i], na[i + 1]) >= 1.0);
    }
  }
}

TEST_CASE("H2 energy of flat Gaussian data") {
  const Run run = dense_run(TargetManifold::flat(3),
                            bump(DataFamily::GaussianBump, 1.0, std::sqrt(0.5)), 1.0 / 128, 8.0,
                            0.05, 0.25);
  const H2Report h2 = h2_energy(run.window(1));
  // |grad phi_1|^2 integrates to 1/2; phi_0 = 0
  CHECK(h2.E1 == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(h2.G1_abs == 0.0);
  CHECK(h2.G1_tilde_abs == 0.0);
}

TEST_CASE("H2 sources are present on the sphere") {
  const Run run = dense_run(TargetManifold::unit_sphere(), bump(DataFamily::RingBump, 0.3, 0.7),
                            1.0 / 32, 8.0, 0.25);
  const SliceWindow w = run.window(2);
  const H2Report h2 = h2_energy(w);
  CHECK(h2.E1 > 0.0);
  CHECK(h2.G1_abs > 0.0);
  const NonlinearDensities d = nonlinear_densities(w, EstimateParams{});
  const H2Report again = h2_from_densities(d, w.grid().dr());
  CHECK(again.E1 == h2.E1);
}

TEST_CASE("nonlinear integrals match a brute-force summation") {
  const EstimateParams P;
  for (TargetKind kind : {TargetKind::Flat, TargetKind::UnitSphere}) {
    const TargetManifold N =
        kind == TargetKind::Flat ? TargetManifold::flat(3) : TargetManifold::unit_sphere();
    const Run run = dense_run(N, bump(DataFamily::GaussianBump, 0.3, 0.7), 1.0 / 32, 8.0, 1.0);
    const NonlinearIntegrals a = nonlinear_integrals(run.traj, run.frames, P);
    const NonlinearIntegrals b = brute_force_integrals(run, P);
    if (kind == TargetKind::Flat) {
      CHECK(a.g1_int == 0.0);
      CHECK(a.g2_int == 0.0);
    } else {
      CHECK(a.g1_int > 0.0);
      CHECK(rel(a.g1_int, b.g1_int) < 1e-12);
      CHECK(rel(a.g2_int, b.g2_int) < 1e-12);
    }
    CHECK(a.bilinear > 0.0);
    CHECK(a.quartic > 0.0);
    CHECK(rel(a.bilinear, b.bilinear) < 1e-12);
    CHECK(rel(a.quartic, b.quartic) < 1e-12);
  }
}

TEST_CASE("functionals are nondecreasing in the amplitude") {
  const EstimateParams P;
  const auto S = TargetManifold::unit_sphere();
  std::vector<double> E, W, g1, bl, qu;
  for (double a : {0.25, 0.5, 1.0}) {
    const Run run = dense_run(S, bump(DataFamily::GaussianBump, a, 0.7), 1.0 / 16, 8.0, 1.0);
    E.push_back(energy(run.traj.snapshots[0]));
    double w = 0.0;
    for (std::size_t i = 0; i < run.traj.snapshots.size(); ++i)
      w += weighted_norms(run.traj.snapshots[i], run.frames[i], P).W_beta;
    W.push_back(w);
    const NonlinearIntegrals ni = nonlinear_integrals(run.traj, run.frames, P);
    g1.push_back(ni.g1_int);
    bl.push_back(ni.bilinear);
    qu.push_back(ni.quartic);
  }
  for (const auto* v : {&E, &W, &g1, &bl, &qu}) {
    CHECK((*v)[0] <= (*v)[1]);
    CHECK((*v)[1] <= (*v)[2]);
  }
}

TEST_CASE("weighted space-time norm under parabolic-free rescaling") {
  // Phi_lambda(t, r) = Phi(t / lambda, r / lambda): E is invariant and
  // int int r^{-beta}|dPhi|^2 dr dt picks up lambda^{-beta}.
  const auto F = TargetManifold::flat(3);
  const double beta = 0.2;
  auto measure = [&](double lambda) {
    const InitialData d = bump(DataFamily::GaussianBump, 0.5 / lambda, 0.5 * lambda);
    const double dr = lambda / 64;
    const FieldState s = init_state(d, RadialGrid(dr, 8.0 * lambda), F, lambda);
    const Trajectory tr = evolve(s, lambda, 0.5 * dr);
    double w = 0.0;
    for (std::size_t i = 1; i < tr.snapshots.size(); ++i)
      w += 0.5 * (weighted_norm_frame_free(tr.snapshots[i - 1], beta) +
                  weighted_norm_frame_free(tr.snapshots[i], beta));
    return std::pair{energy(s), w * tr.dt};
  };
  const auto [e1, w1] = measure(1.0);
  const auto [e2, w2] = measure(2.0);
  CHECK(e2 == doctest::Approx(e1).epsilon(1e-10));
  CHECK(std::fabs(std::log2(w2 / w1) + beta) < 0.05);
}

TEST_CASE("Sobolev-Hardy ratio") {
  const double beta = 0.2;
  const RadialGrid g(1.0 / 256, 16.0);
  std::vector<double> zero(g.size(), 0.0);
  const SobolevHardySides z = sobolev_hardy_sides(g, zero, beta);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);
  try {
    sobolev_hardy_ratio(g, zero, beta);
    FAIL("expected DegenerateProfile");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateProfile);
  }

  // e^{-r^2} against adaptive quadrature of the four closed-form integrands.
  std::vector<double> psi(g.size());
  for (int j = 0; j < g.size(); ++j) psi[j] = std::exp(-g.r(j) * g.r(j));
  // integrands are below 1e-40 past r = 7
  boost::math::quadrature::tanh_sinh<double> quad;
  auto half_line = [&](auto f) { return quad.integrate(f, 0.0, 7.0); };
  const double lhs = half_line([&](double r) { return std::pow(r, beta) * std::exp(-4 * r * r); });
  const double a = half_line([&](double r) { return std::pow(r, -beta) * std::exp(-2 * r * r); });
  const double b = half_line([&](double r) { return r * std::exp(-2 * r * r); });
  const double c = half_line([&](double r) { return 4 * r * r * r * std::exp(-2 * r * r); });
  const double oracle = lhs / (a * std::pow(b, beta) * std::pow(c, 1 - beta));
  CHECK(std::fabs(sobolev_hardy_ratio(g, psi, beta) - oracle) < 1e-6);
}

TEST_CASE("Sobolev-Hardy ratio is scale invariant") {
  const double beta = 0.2;
  const RadialGrid g(1.0 / 512, 24.0);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coef(-1.0, 1.0), width(0.4, 1.5);
  for (int trial = 0; trial < 10; ++trial) {
    double c[3], w[3];
    for (int k = 0; k < 3; ++k) {
      c[k] = coef(rng);
      w[k] = width(rng);
    }
    auto profile = [&](double lambda) {
      std::vector<double> p(g.size());
      for (int j = 0; j < g.size(); ++j) {
        const double r = lambda * g.r(j);
        for (int k = 0; k < 3; ++k) p[j] += c[k] * std::exp(-r * r / (w[k] * w[k]));
      }
      return p;
    };
    const double base = sobolev_hardy_ratio(g, profile(1.0), beta);
    for (double lambda : {0.5, 2.0})
      CHECK(std::fabs(sobolev_hardy_ratio(g, profile(lambda), beta) - base) <= 1e-8 * base);
  }
}

}
