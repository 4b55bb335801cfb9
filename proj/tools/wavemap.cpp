#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <string>

#include "wavemap/error.hpp"
#include "wavemap/harness.hpp"

namespace {

std::vector<double> parse_amplitudes(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw wavemap::ConfigError("--amplitudes", "not a number: '" + item + "'");
    }
  }
  return out;
}

void report(const wavemap::RunRecord& rec, const std::string& dir) {
  std::cout << "status: " << rec.status << '\n';
  for (const auto& [k, v] : rec.results) std::cout << k << ": " << wavemap::format_double(v) << '\n';
  std::cout << "wrote " << dir << "/manifest.yaml and " << dir << "/series.csv\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial wave maps: solver, gauge and estimate diagnostics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(wavemap::version()));

  std::string config_path;
  int levels = 3;
  std::string amplitudes;
  std::uint64_t seed = 0;
  int trials = 100;
  int cells = 64;
  int modes = 4;
  std::string out_dir = "wavemap_divcurl";

  auto* run = app.add_subcommand("run", "single evolution with diagnostics");
  run->add_option("--config", config_path, "config file")->required();

  auto* conv = app.add_subcommand("convergence", "refinement study");
  conv->add_option("--config", config_path, "config file")->required();
  conv->add_option("--levels", levels, "number of resolutions (>= 3)")->required();

  auto* sweep = app.add_subcommand("sweep", "amplitude sweep");
  sweep->add_option("--config", config_path, "config file")->required();
  sweep->add_option("--amplitudes", amplitudes, "comma separated, increasing")->required();

  auto* dc = app.add_subcommand("divcurl", "synthetic div-curl corpus");
  dc->add_option("--seed", seed, "first seed")->required();
  dc->add_option("--trials", trials, "number of seeds")->required();
  dc->add_option("--grid", cells, "lattice cells per unit horizon")->required();
  dc->add_option("--modes", modes, "random modes per field");
  dc->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    wavemap::RunConfig cfg;
    if (*dc) {
      cfg.kind = wavemap::ExperimentKind::DivCurl;
      cfg.seed = seed;
      cfg.divcurl_trials = trials;
      cfg.divcurl_grid = cells;
      cfg.divcurl_modes = modes;
      cfg.output_dir = out_dir;
    } else {
      cfg = wavemap::load_config(config_path);
      if (*run) {
        cfg.kind = wavemap::ExperimentKind::Run;
      } else if (*conv) {
        cfg.kind = wavemap::ExperimentKind::Convergence;
        cfg.levels = levels;
      } else {
        cfg.kind = wavemap::ExperimentKind::Sweep;
        cfg.amplitudes = parse_amplitudes(amplitudes);
      }
    }
    cfg.validate();
    const wavemap::RunRecord rec = wavemap::run_experiment(cfg);
    report(rec, cfg.output_dir);
    // a sweep records per-amplitude failures and finishes anyway
    return rec.status == "ok" ? 0 : 3;
  } catch (const wavemap::ConfigError& e) {
    std::cerr << "config error [" << e.key() << "]: " << e.what() << '\n';
    return 2;
  } catch (const wavemap::Error& e) {
    if (!e.is_numerical()) {
      std::cerr << "invalid input (" << wavemap::to_string(e.code()) << "): " << e.what() << '\n';
      return 2;
    }
    std::cerr << "numerical failure (" << wavemap::to_string(e.code()) << "): " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
