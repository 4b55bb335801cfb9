// Acceptance suite: one verdict line per criterion, measured values alongside.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "divcurl_oracle.hpp"
#include "wavemap/error.hpp"
#include "wavemap/harness.hpp"

using namespace wavemap;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double order(double coarse, double fine) { return std::log2(coarse / fine); }

double rel(double a, double b) {
  return a == b ? 0.0 : std::fabs(a - b) / std::max(std::fabs(a), std::fabs(b));
}

int failures = 0;

void verdict(int n, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  std::printf("criterion %2d: %s  %s\n", n, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// Sphere target, Gaussian velocity bump at the axis.
RunConfig sphere_gaussian(double dr, double amplitude = 0.1) {
  RunConfig c;
  c.target = TargetKind::UnitSphere;
  c.dr = dr;
  c.r_max = 16.0;
  c.t_end = 8.0;
  c.cfl = 0.5;
  c.data.family = DataFamily::GaussianBump;
  c.data.amplitude = amplitude;
  c.data.width = std::sqrt(0.5);
  c.data.center = 0.0;
  return c;
}

// Displaced ring data: A0 is not identically zero, so the two routes can be compared.
RunConfig sphere_ring(double dr, double amplitude) {
  RunConfig c;
  c.target = TargetKind::UnitSphere;
  c.dr = dr;
  c.r_max = 10.0;
  c.t_end = 2.0;
  c.cfl = 0.5;
  c.data.family = DataFamily::RingBump;
  c.data.amplitude = amplitude;
  c.data.width = 0.7;
  c.data.center = 0.0;
  return c;
}

struct Shared {
  std::vector<SimulationResult> c1;  // dr = 2^-6, 2^-7, 2^-8
  double c1_seconds = 0.0;
};

void criteria_1_2_4(Shared& s) {
  for (int k = 6; k <= 8; ++k) {
    const auto t0 = Clock::now();
    s.c1.push_back(simulate(sphere_gaussian(std::ldexp(1.0, -k))));
    if (k == 8) s.c1_seconds = seconds_since(t0);
  }
  const auto& a = s.c1[1].summary;
  const auto& b = s.c1[2].summary;

  const double factor = a.max_energy_drift / b.max_energy_drift;
  verdict(1, b.max_energy_drift <= 1e-4 && factor >= 3.5 && s.c1_seconds <= 60.0,
          "drift " + fmt("%.3e", b.max_energy_drift) + " halving factor " + fmt("%.2f", factor) +
              " runtime " + fmt("%.1f", s.c1_seconds) + " s");

  const double pre_order = order(a.max_preprojection, b.max_preprojection);
  verdict(2, b.max_constraint <= 1e-10 && pre_order >= 1.8,
          "max ||phi|-1| " + fmt("%.2e", b.max_constraint) + " pre-projection " +
              fmt("%.2e", a.max_preprojection) + " -> " + fmt("%.2e", b.max_preprojection) +
              " order " + fmt("%.2f", pre_order));

  double worst = 1e300;
  std::string detail;
  for (std::size_t k = 0; k + 1 < s.c1.size(); ++k) {
    const auto& x = s.c1[k].summary;
    const auto& y = s.c1[k + 1].summary;
    const double o213 = order(x.max_gauge_213, y.max_gauge_213);
    const double o214 = order(x.max_gauge_214, y.max_gauge_214);
    worst = std::min({worst, o213, o214});
    detail += " orders " + fmt("%.2f", o213) + "/" + fmt("%.2f", o214);
  }
  verdict(4, worst >= 1.0,
          "residuals " + fmt("%.2e", s.c1[0].summary.max_gauge_213) + "/" +
              fmt("%.2e", s.c1[0].summary.max_gauge_214) + " ->" +
              fmt(" %.2e", s.c1[2].summary.max_gauge_213) + "/" +
              fmt("%.2e", s.c1[2].summary.max_gauge_214) + detail);
}

void criterion_3() {
  const auto t0 = Clock::now();
  RunConfig c;
  c.target = TargetKind::Flat;
  c.ambient_dim = 3;
  c.dr = 1.0 / 32;
  c.r_max = 12.0;
  c.t_end = 4.0;
  c.cfl = 0.5;
  c.data.family = DataFamily::RingBump;
  c.data.amplitude = 1.0;
  c.data.width = 0.7;
  const ConvergenceReport rep = convergence_study(c, 3);
  const double secs = seconds_since(t0);
  const double worst = *std::min_element(rep.solution_orders.begin(), rep.solution_orders.end());
  std::string detail = "errors";
  for (const auto& l : rep.levels) detail += fmt(" %.3e", l.solution_error);
  detail += " orders";
  for (double o : rep.solution_orders) detail += fmt(" %.3f", o);
  verdict(3, worst >= 1.85 && secs <= 300.0, detail + " runtime " + fmt("%.1f", secs) + " s");
}

void criteria_5_6() {
  const double drs[] = {1.0 / 16, 1.0 / 32, 1.0 / 64};
  const double amps[] = {0.05, 0.1, 0.2};
  std::vector<SimulationResult> runs;
  runs.reserve(9);
  for (int i = 0; i < 9; ++i) runs.push_back(simulate(sphere_ring(drs[i / 3], amps[i % 3])));

  // A0 routes at the middle amplitude.
  double worst = 1e300;
  std::string gaps = "A0 gap";
  for (int k = 0; k < 3; ++k) {
    gaps += fmt(" %.3e", runs[3 * k + 1].summary.max_f01_consistency);
    if (k > 0)
      worst = std::min(worst, order(runs[3 * (k - 1) + 1].summary.max_f01_consistency,
                                    runs[3 * k + 1].summary.max_f01_consistency));
  }
  double cmin = 1e300, cmax = 0.0;
  for (const auto& r : runs) {
    const double C = r.summary.max_a0_rmax / r.summary.E0;
    cmin = std::min(cmin, C);
    cmax = std::max(cmax, C);
  }
  verdict(5, worst >= 1.0 && cmax < 3.0 * cmin,
          gaps + " min order " + fmt("%.2f", worst) + " C in [" + fmt("%.4g", cmin) + ", " +
              fmt("%.4g", cmax) + "]");

  double ob = 1e300, on = 1e300;
  std::string detail = "balance";
  for (int k = 0; k < 3; ++k) detail += fmt(" %.3e", runs[3 * k + 1].summary.int_balance);
  detail += " null";
  for (int k = 0; k < 3; ++k) detail += fmt(" %.3e", runs[3 * k + 1].summary.int_null);
  for (int k = 1; k < 3; ++k) {
    const auto& x = runs[3 * (k - 1) + 1].summary;
    const auto& y = runs[3 * k + 1].summary;
    ob = std::min(ob, order(x.int_balance, y.int_balance));
    on = std::min(on, order(x.int_null, y.int_null));
  }
  verdict(6, ob >= 1.0 && on >= 1.0,
          detail + " min orders " + fmt("%.2f", ob) + "/" + fmt("%.2f", on));
}

void criterion_7() {
  const auto t0 = Clock::now();
  const DivCurlReport rep = divcurl_corpus(0, 100, 64);
  double worst_invariant = 0.0;
  for (const auto& t : rep.trials) worst_invariant = std::max(worst_invariant, t.invariants.total());

  double worst_oracle = 0.0;
  for (int cells : {8, 16})
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const DivCurlField f = synthesize_field(seed, cells);
      const testing_support::DivCurlOracle o{f};
      const FluxBounds a = flux_bounds(f), b = o.flux();
      worst_oracle = std::max({worst_oracle, rel(a.lhs1, b.lhs1), rel(a.rhs1, b.rhs1),
                               rel(a.lhs2, b.lhs2), rel(a.rhs2, b.rhs2),
                               rel(bilinear_bound(f).lhs, o.bilinear_lhs())});
    }
  const double secs = seconds_since(t0);
  const bool ok = worst_invariant <= 1e-10 && worst_oracle <= 1e-12 && rep.max_bilinear <= 4.0 &&
                  std::fabs(rep.bump_ratio1 - 1.0) <= 0.05 && secs <= 120.0;
  verdict(7, ok,
          "invariant residual " + fmt("%.1e", worst_invariant) + " oracle " +
              fmt("%.1e", worst_oracle) + " max ratios " + fmt("%.3f", rep.max_ratio1) + "/" +
              fmt("%.3f", rep.max_ratio2) + " bilinear " + fmt("%.3f", rep.max_bilinear) +
              " bump " + fmt("%.4f", rep.bump_ratio1) + " runtime " + fmt("%.1f", secs) + " s");
}

void criterion_8() {
  const double beta = 0.2;
  const RadialGrid g(1.0 / 512, 24.0);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coef(-1.0, 1.0), width(0.4, 1.5);
  double worst_scale = 0.0;
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
      worst_scale = std::max(worst_scale, rel(sobolev_hardy_ratio(g, profile(lambda), beta), base));
  }

  const RadialGrid fine(1.0 / 256, 16.0);
  std::vector<double> psi(fine.size());
  for (int j = 0; j < fine.size(); ++j) psi[j] = std::exp(-fine.r(j) * fine.r(j));
  boost::math::quadrature::tanh_sinh<double> quad;
  auto half_line = [&](auto f) { return quad.integrate(f, 0.0, 7.0); };
  const double lhs = half_line([&](double r) { return std::pow(r, beta) * std::exp(-4 * r * r); });
  const double a = half_line([&](double r) { return std::pow(r, -beta) * std::exp(-2 * r * r); });
  const double b = half_line([&](double r) { return r * std::exp(-2 * r * r); });
  const double d = half_line([&](double r) { return 4 * r * r * r * std::exp(-2 * r * r); });
  const double oracle = lhs / (a * std::pow(b, beta) * std::pow(d, 1 - beta));
  const double err = std::fabs(sobolev_hardy_ratio(fine, psi, beta) - oracle);
  verdict(8, worst_scale <= 1e-8 && err <= 1e-6,
          "scale deviation " + fmt("%.1e", worst_scale) + " oracle error " + fmt("%.1e", err));
}

void criterion_9() {
  const auto t0 = Clock::now();
  const SweepReport rep = amplitude_sweep(sphere_gaussian(1.0 / 256), {0.05, 0.1, 0.2});
  const double secs = seconds_since(t0);
  bool all_ok = true;
  std::string detail;
  for (const auto& e : rep.entries) {
    all_ok = all_ok && e.status == "ok";
    detail += fmt(" a=%.2f", e.amplitude) + fmt(" g1 %.3e", e.summary.g1_int) +
              fmt(" g2 %.3e", e.summary.g2_int) + fmt(" G %.3e", e.summary.G_beta_int) + ";";
  }
  const bool ok = all_ok && rep.max_h2_ratio <= 2.0 && rep.g1_increasing && rep.g2_increasing &&
                  rep.G_beta_increasing && secs <= 600.0;
  verdict(9, ok, "max H2 ratio " + fmt("%.4f", rep.max_h2_ratio) + ";" + detail + " runtime " +
                     fmt("%.1f", secs) + " s");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void criterion_10() {
  const fs::path root = fs::temp_directory_path() / "wavemap_acceptance";
  fs::remove_all(root);
  bool same = true;
  std::string detail;
  auto twice = [&](RunConfig c, const std::string& name) {
    std::string out[2];
    for (int k = 0; k < 2; ++k) {
      c.output_dir = (root / (name + std::to_string(k))).string();
      run_experiment(c);
      out[k] = slurp(fs::path(c.output_dir) / "series.csv");
    }
    const bool eq = !out[0].empty() && out[0] == out[1];
    same = same && eq;
    detail += " " + name + (eq ? " identical" : " differs") + " (" +
              std::to_string(out[0].size()) + " bytes)";
  };
  twice(sphere_gaussian(1.0 / 128), "run");
  RunConfig dc;
  dc.kind = ExperimentKind::DivCurl;
  dc.divcurl_trials = 20;
  dc.divcurl_grid = 32;
  twice(dc, "divcurl");
  fs::remove_all(root);
  verdict(10, same, detail.substr(1));
}

void guarded(int n, const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    verdict(n, false, std::string("threw: ") + e.what());
  }
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  Shared shared;
  guarded(1, [&] { criteria_1_2_4(shared); });
  guarded(3, criterion_3);
  guarded(5, criteria_5_6);
  guarded(7, criterion_7);
  guarded(8, criterion_8);
  guarded(9, criterion_9);
  guarded(10, criterion_10);
  std::printf("%d criteria not met; total %.1f s\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
