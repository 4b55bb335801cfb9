#include "wavemap/harness.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <climits>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include "wavemap/error.hpp"

#ifndef WAVEMAP_VERSION
#define WAVEMAP_VERSION "dev"
#endif

namespace wavemap {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double order(double coarse, double fine) {
  if (!(coarse > 0.0) || !(fine > 0.0)) return kNaN;
  return std::log2(coarse / fine);
}

template <class Get>
std::vector<double> pairwise_orders(const std::vector<ConvergenceLevel>& levels, Get get) {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < levels.size(); ++k)
    out.push_back(order(get(levels[k]), get(levels[k + 1])));
  return out;
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return !v.empty();
}

void add_summary(std::map<std::string, double>& out, const std::string& prefix,
                 const DiagnosticsSummary& s) {
  const std::pair<const char*, double> items[] = {
      {"E0", s.E0},
      {"max_energy_drift", s.max_energy_drift},
      {"max_constraint", s.max_constraint},
      {"max_preprojection", s.max_preprojection},
      {"max_gauge_res_213", s.max_gauge_213},
      {"max_gauge_res_214", s.max_gauge_214},
      {"max_balance_residual", s.max_balance},
      {"max_null_residual", s.max_null},
      {"int_balance_residual", s.int_balance},
      {"int_null_residual", s.int_null},
      {"max_a0_rmax_bound", s.max_a0_rmax},
      {"max_f01_consistency", s.max_f01_consistency},
      {"max_a0_antisymmetry_defect", s.max_a0_defect},
      {"max_transport_residual", s.max_transport},
      {"min_null_domination", std::isfinite(s.min_domination) ? s.min_domination : kNaN},
      {"h2_initial", s.h2_initial},
      {"h2_sup", s.h2_sup},
      {"G1_abs_int", s.G1_abs_int},
      {"g1_int", s.g1_int},
      {"g2_int", s.g2_int},
      {"G_beta_int", s.G_beta_int},
      {"G_hat_alpha_int", s.G_hat_alpha_int},
      {"null_bilinear", s.null_bilinear},
      {"null_quartic", s.null_quartic},
      {"W_beta_int", s.W_beta_int},
  };
  for (const auto& [k, v] : items) out[prefix + k] = v;
}

}  // namespace

std::string_view version() { return WAVEMAP_VERSION; }

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c];
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + format_double(row[c]);
    out += '\n';
  }
  return out;
}

int worker_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("WAVEMAP_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min<long>(n, cap);
  }
  return n;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  std::vector<std::exception_ptr> errors(n);
  const int workers = std::min(worker_count(), n);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

SimulationResult simulate(const RunConfig& config, bool diagnostics) {
  const RadialGrid grid = config.make_grid();
  const TargetManifold target = config.make_target();
  const FieldState state = init_state(config.data, grid, target, config.t_end);

  DiagnosticsOptions opts;
  opts.gauge = config.gauge_enabled;
  opts.antisymmetrize = config.antisymmetrize;
  opts.h2 = config.h2_enabled;
  opts.record_every = config.save_every;
  opts.params = config.params;
  DiagnosticsRecorder recorder(opts);
  std::vector<Observer> observers;
  if (diagnostics) observers.push_back(recorder.observer());

  SolverOptions solver;
  solver.blowup_cap = config.blowup_cap;
  Trajectory traj = evolve(state, config.t_end, config.dt(), observers, INT_MAX, solver);
  return SimulationResult{std::move(traj.snapshots.back()), recorder.records(),
                          recorder.summary(), traj.dt, traj.steps};
}

double solution_error(const FieldState& coarse, const FieldState& fine) {
  const double ratio = coarse.grid.dr() / fine.grid.dr();
  const int f = static_cast<int>(std::lround(ratio));
  if (f < 2 || f % 2 != 0 || std::fabs(ratio - f) > 1e-9 * ratio)
    throw Error(ErrorCode::BadResolution, "reference dr must be an even fraction of the coarse dr");
  const int n = coarse.dim();
  const int J = coarse.nodes();
  if (fine.nodes() < J * f) throw Error(ErrorCode::BadResolution, "reference grid too short");
  double sum = 0.0;
  for (int j = 0; j < J; ++j) {
    // Coarse node r_j sits midway between fine nodes jf + f/2 - 1 and jf + f/2.
    const int lo = j * f + f / 2 - 1;
    double d2 = 0.0;
    for (int a = 0; a < n; ++a) {
      const double ref = 0.5 * (fine.phi[lo * n + a] + fine.phi[(lo + 1) * n + a]);
      const double d = coarse.phi[j * n + a] - ref;
      d2 += d * d;
    }
    sum += coarse.grid.r(j) * d2;
  }
  return std::sqrt(sum * coarse.grid.dr());
}

ConvergenceReport convergence_study(const RunConfig& config, int levels) {
  if (levels < 3) throw ConfigError("experiment.levels", "need at least 3 levels");
  ConvergenceReport rep;
  rep.levels.resize(levels);
  std::vector<std::optional<FieldState>> finals(levels + 1);
  const double finest = config.dr / std::ldexp(1.0, levels - 1);
  rep.reference_dr = finest / 4.0;
  parallel_for(levels + 1, [&](int k) {
    RunConfig c = config;
    if (k == levels) {
      c.dr = rep.reference_dr;
      finals[k].emplace(simulate(c, false).final_state);
      return;
    }
    c.dr = config.dr / std::ldexp(1.0, k);
    SimulationResult res = simulate(c, true);
    rep.levels[k].dr = c.dr;
    rep.levels[k].summary = res.summary;
    finals[k].emplace(std::move(res.final_state));
  });
  for (int k = 0; k < levels; ++k) rep.levels[k].solution_error = solution_error(*finals[k], *finals[levels]);

  const auto& L = rep.levels;
  rep.solution_orders = pairwise_orders(L, [](const auto& l) { return l.solution_error; });
  rep.gauge213_orders = pairwise_orders(L, [](const auto& l) { return l.summary.max_gauge_213; });
  rep.gauge214_orders = pairwise_orders(L, [](const auto& l) { return l.summary.max_gauge_214; });
  rep.balance_orders = pairwise_orders(L, [](const auto& l) { return l.summary.int_balance; });
  rep.null_orders = pairwise_orders(L, [](const auto& l) { return l.summary.int_null; });
  rep.f01_orders = pairwise_orders(L, [](const auto& l) { return l.summary.max_f01_consistency; });
  rep.drift_orders = pairwise_orders(L, [](const auto& l) { return l.summary.max_energy_drift; });
  return rep;
}

Table ConvergenceReport::table() const {
  Table t;
  t.columns = {"level",          "dr",              "solution_error", "solution_order",
               "gauge_res_213",  "gauge_213_order", "gauge_res_214",  "gauge_214_order",
               "balance_residual", "balance_order", "null_residual",  "null_order",
               "f01_consistency", "f01_order",      "energy_drift",   "drift_order",
               "a0_rmax_bound"};
  for (std::size_t k = 0; k < levels.size(); ++k) {
    auto o = [&](const std::vector<double>& v) { return k == 0 ? kNaN : v[k - 1]; };
    const auto& l = levels[k];
    const auto& s = l.summary;
    t.rows.push_back({static_cast<double>(k), l.dr, l.solution_error, o(solution_orders),
                      s.max_gauge_213, o(gauge213_orders), s.max_gauge_214, o(gauge214_orders),
                      s.int_balance, o(balance_orders), s.int_null, o(null_orders),
                      s.max_f01_consistency, o(f01_orders), s.max_energy_drift, o(drift_orders),
                      s.max_a0_rmax});
  }
  return t;
}

SweepReport amplitude_sweep(const RunConfig& config, const std::vector<double>& amplitudes) {
  SweepReport rep;
  rep.entries.resize(amplitudes.size());
  parallel_for(static_cast<int>(amplitudes.size()), [&](int k) {
    RunConfig c = config;
    c.data.amplitude = amplitudes[k];
    SweepEntry& e = rep.entries[k];
    e.amplitude = amplitudes[k];
    try {
      e.summary = simulate(c, true).summary;
    } catch (const Error& err) {
      if (!err.is_numerical()) throw;
      e.status = err.what();
    }
  });
  std::vector<double> E0, g1, g2, gb;
  for (const auto& e : rep.entries) {
    if (e.status != "ok") continue;
    E0.push_back(e.summary.E0);
    g1.push_back(e.summary.g1_int);
    g2.push_back(e.summary.g2_int);
    gb.push_back(e.summary.G_beta_int);
    if (e.summary.h2_initial > 0.0)
      rep.max_h2_ratio = std::max(rep.max_h2_ratio, e.summary.h2_sup / e.summary.h2_initial);
  }
  const bool all_ok = E0.size() == rep.entries.size();
  rep.E0_increasing = all_ok && strictly_increasing(E0);
  rep.g1_increasing = all_ok && strictly_increasing(g1);
  rep.g2_increasing = all_ok && strictly_increasing(g2);
  rep.G_beta_increasing = all_ok && strictly_increasing(gb);
  return rep;
}

Table SweepReport::table() const {
  Table t;
  t.columns = {"amplitude", "ok",         "E0",        "h2_initial",    "h2_sup",
               "h2_ratio",  "g1_int",     "g2_int",    "G_beta_int",    "G1_abs_int",
               "source_ratio", "null_bilinear", "null_quartic", "W_beta_int", "max_energy_drift"};
  for (const auto& e : entries) {
    const auto& s = e.summary;
    const bool ok = e.status == "ok";
    const double h2r = s.h2_initial > 0.0 ? s.h2_sup / s.h2_initial : kNaN;
    // Space-time H^2 source against E0 * E1, the smallness claim of the
    // H^2 bootstrap as a measured constant.
    const double src = s.E0 > 0.0 && s.h2_initial > 0.0 ? s.G1_abs_int / (s.E0 * s.h2_initial) : kNaN;
    if (!ok) {
      t.rows.push_back({e.amplitude, 0.0, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN,
                        kNaN, kNaN, kNaN, kNaN});
      continue;
    }
    t.rows.push_back({e.amplitude, 1.0, s.E0, s.h2_initial, s.h2_sup, h2r, s.g1_int, s.g2_int,
                      s.G_beta_int, s.G1_abs_int, src, s.null_bilinear, s.null_quartic,
                      s.W_beta_int, s.max_energy_drift});
  }
  return t;
}

DivCurlReport divcurl_corpus(std::uint64_t seed, int trials, int cells, int modes) {
  DivCurlReport rep;
  rep.trials.resize(trials);
  parallel_for(trials, [&](int k) {
    DivCurlTrial& tr = rep.trials[k];
    tr.seed = seed + static_cast<std::uint64_t>(k);
    const DivCurlField f = synthesize_field(tr.seed, cells, modes);
    tr.invariants = require_invariants(f);
    tr.flux = flux_bounds(f);
    tr.bilinear = bilinear_bound(f);
  });
  for (const auto& tr : rep.trials) {
    rep.max_ratio1 = std::max(rep.max_ratio1, tr.flux.ratio1);
    rep.max_ratio2 = std::max(rep.max_ratio2, tr.flux.ratio2);
    rep.max_bilinear = std::max(rep.max_bilinear, tr.bilinear.ratio);
  }
  rep.bump_ratio1 = flux_bounds(bump_field(cells)).ratio1;
  return rep;
}

Table DivCurlReport::table() const {
  Table t;
  t.columns = {"seed", "ratio1", "ratio2", "bilinear_ratio", "invariant_residuals"};
  for (const auto& tr : trials)
    t.rows.push_back({static_cast<double>(tr.seed), tr.flux.ratio1, tr.flux.ratio2,
                      tr.bilinear.ratio, tr.invariants.total()});
  return t;
}

RunRecord run_experiment(const RunConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.config = config.resolved();
  rec.version_tag = std::string(version());
  auto finish = [&] {
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_record(rec, config.output_dir);
  };
  try {
    switch (config.kind) {
      case ExperimentKind::Run: {
        const SimulationResult res = simulate(config, true);
        rec.series.columns = DiagnosticsRecord::columns();
        for (const auto& r : res.records) rec.series.rows.push_back(r.values());
        add_summary(rec.results, "", res.summary);
        rec.results["dt"] = res.dt;
        rec.results["steps"] = static_cast<double>(res.steps);
        break;
      }
      case ExperimentKind::Convergence: {
        const ConvergenceReport rep = convergence_study(config, config.levels);
        rec.series = rep.table();
        rec.results["reference_dr"] = rep.reference_dr;
        auto minv = [](const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); };
        rec.results["min_solution_order"] = minv(rep.solution_orders);
        rec.results["min_gauge_213_order"] = minv(rep.gauge213_orders);
        rec.results["min_gauge_214_order"] = minv(rep.gauge214_orders);
        rec.results["min_balance_order"] = minv(rep.balance_orders);
        rec.results["min_null_order"] = minv(rep.null_orders);
        break;
      }
      case ExperimentKind::Sweep: {
        const SweepReport rep = amplitude_sweep(config, config.amplitudes);
        rec.series = rep.table();
        rec.results["max_h2_ratio"] = rep.max_h2_ratio;
        rec.results["E0_increasing"] = rep.E0_increasing;
        rec.results["g1_increasing"] = rep.g1_increasing;
        rec.results["g2_increasing"] = rep.g2_increasing;
        rec.results["G_beta_increasing"] = rep.G_beta_increasing;
        for (const auto& e : rep.entries)
          if (e.status != "ok") rec.status = "partial: " + e.status;
        break;
      }
      case ExperimentKind::DivCurl: {
        const DivCurlReport rep =
            divcurl_corpus(config.seed, config.divcurl_trials, config.divcurl_grid, config.divcurl_modes);
        rec.series = rep.table();
        rec.results["max_ratio1"] = rep.max_ratio1;
        rec.results["max_ratio2"] = rep.max_ratio2;
        rec.results["max_bilinear_ratio"] = rep.max_bilinear;
        rec.results["bump_ratio1"] = rep.bump_ratio1;
        break;
      }
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    rec.status = std::string("failed: ") + e.what();
    finish();
    throw;
  }
  finish();
  return rec;
}

void write_record(const RunRecord& record, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  YAML::Emitter y;
  y << YAML::BeginMap;
  y << YAML::Key << "version" << YAML::Value << record.version_tag;
  y << YAML::Key << "status" << YAML::Value << record.status;
  y << YAML::Key << "wall_seconds" << YAML::Value << format_double(record.wall_seconds);
  y << YAML::Key << "config" << YAML::Value << YAML::BeginMap;
  for (const auto& [k, v] : record.config) y << YAML::Key << k << YAML::Value << v;
  y << YAML::EndMap;
  y << YAML::Key << "results" << YAML::Value << YAML::BeginMap;
  for (const auto& [k, v] : record.results) y << YAML::Key << k << YAML::Value << format_double(v);
  y << YAML::EndMap;
  y << YAML::Key << "series" << YAML::Value << YAML::BeginMap;
  y << YAML::Key << "file" << YAML::Value << "series.csv";
  y << YAML::Key << "rows" << YAML::Value << record.series.rows.size();
  y << YAML::Key << "columns" << YAML::Value << YAML::Flow << record.series.columns;
  y << YAML::EndMap;
  y << YAML::EndMap;

  std::ofstream(dir / "manifest.yaml") << y.c_str() << '\n';
  std::ofstream(dir / "series.csv", std::ios::binary) << record.series.to_csv();
}

}  // namespace wavemap
