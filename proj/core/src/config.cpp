#include "wavemap/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "wavemap/error.hpp"

namespace wavemap {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "target.kind",         "target.ambient_dim",   "grid.dr",
      "grid.r_max",          "time.t_end",           "time.cfl",
      "data.family",         "data.amplitude",       "data.width",
      "data.center",         "output.save_every",    "output.dir",
      "gauge.enabled",       "gauge.antisymmetrize", "estimates.alpha",
      "estimates.beta",      "estimates.sigma",      "estimates.h2_enabled",
      "estimates.absorption_margin", "experiment.kind", "experiment.levels",
      "experiment.amplitudes", "divcurl.trials",     "divcurl.grid",
      "divcurl.modes",       "seed",                 "solver.blowup_cap"};
  return keys;
}

using Flat = std::map<std::string, YAML::Node>;

void flatten(const YAML::Node& node, const std::string& prefix, Flat& out) {
  if (node.IsMap()) {
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      flatten(kv.second, prefix.empty() ? key : prefix + "." + key, out);
    }
    return;
  }
  if (prefix.empty()) throw ConfigError("<root>", "configuration must be a mapping");
  if (out.count(prefix)) throw ConfigError(prefix, "key given twice");
  out[prefix] = node;
}

template <class T>
T get(const Flat& flat, const std::string& key) {
  try {
    return flat.at(key).as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(key, "value has the wrong type");
  }
}

template <class T>
void read(const Flat& flat, const std::string& key, T& out) {
  if (flat.count(key)) out = get<T>(flat, key);
}

template <class T>
void require(const Flat& flat, const std::string& key, T& out) {
  if (!flat.count(key)) throw ConfigError(key, "required key is missing");
  out = get<T>(flat, key);
}

std::vector<double> read_list(const Flat& flat, const std::string& key) {
  const YAML::Node& n = flat.at(key);
  std::vector<double> out;
  try {
    if (n.IsSequence()) {
      for (const auto& x : n) out.push_back(x.as<double>());
    } else {
      std::stringstream ss(n.as<std::string>());
      std::string item;
      while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    }
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a list of numbers");
  }
  return out;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  if (name == "run") return ExperimentKind::Run;
  if (name == "convergence") return ExperimentKind::Convergence;
  if (name == "sweep") return ExperimentKind::Sweep;
  if (name == "divcurl") return ExperimentKind::DivCurl;
  throw ConfigError("experiment.kind", "unknown experiment '" + std::string(name) + "'");
}

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Run: return "run";
    case ExperimentKind::Convergence: return "convergence";
    case ExperimentKind::Sweep: return "sweep";
    case ExperimentKind::DivCurl: return "divcurl";
  }
  return "?";
}

TargetManifold RunConfig::make_target() const {
  switch (target) {
    case TargetKind::UnitSphere: return TargetManifold::unit_sphere(2);
    case TargetKind::CliffordTorus: return TargetManifold::clifford_torus();
    case TargetKind::Flat: return TargetManifold::flat(ambient_dim);
  }
  throw ConfigError("target.kind", "unknown target");
}

RadialGrid RunConfig::make_grid() const {
  try {
    return RadialGrid(dr, r_max);
  } catch (const Error& e) {
    throw ConfigError("grid.dr", e.what());
  }
}

void RunConfig::validate() const {
  if (kind == ExperimentKind::DivCurl) {
    if (divcurl_trials < 1) throw ConfigError("divcurl.trials", "need at least one trial");
    if (divcurl_grid < 1) throw ConfigError("divcurl.grid", "need at least one cell");
    if (divcurl_modes < 0) throw ConfigError("divcurl.modes", "must be nonnegative");
    return;
  }
  if (target == TargetKind::Flat && ambient_dim < 1)
    throw ConfigError("target.ambient_dim", "must be at least 1");
  make_grid();
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("time.t_end", "must be positive");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("time.cfl", "must lie in (0, 1]");
  if (data.family != DataFamily::Zero) {
    if (!(data.amplitude >= 0.0) || !std::isfinite(data.amplitude))
      throw ConfigError("data.amplitude", "must be finite and nonnegative");
    if (!(data.width > 0.0)) throw ConfigError("data.width", "must be positive");
    if (!(data.center >= 0.0)) throw ConfigError("data.center", "must be nonnegative");
    if (data.support_radius() > r_max - t_end - 1.0) {
      std::ostringstream os;
      os << "data support radius " << data.support_radius() << " exceeds r_max - t_end - 1 = "
         << r_max - t_end - 1.0;
      throw ConfigError("grid.r_max", os.str());
    }
  }
  if (save_every < 1) throw ConfigError("output.save_every", "must be at least 1");
  if (!(blowup_cap > 0.0)) throw ConfigError("solver.blowup_cap", "must be positive");
  params.validate();
  if (kind == ExperimentKind::Convergence && levels < 3)
    throw ConfigError("experiment.levels", "need at least 3 levels");
  if (kind == ExperimentKind::Sweep) {
    if (amplitudes.empty()) throw ConfigError("experiment.amplitudes", "no amplitudes given");
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
      if (!(amplitudes[i] >= 0.0)) throw ConfigError("experiment.amplitudes", "must be nonnegative");
      if (i > 0 && !(amplitudes[i] > amplitudes[i - 1]))
        throw ConfigError("experiment.amplitudes", "must be strictly increasing");
    }
  }
}

std::map<std::string, std::string> RunConfig::resolved() const {
  std::map<std::string, std::string> m;
  auto b = [](bool x) { return std::string(x ? "true" : "false"); };
  m["experiment.kind"] = std::string(to_string(kind));
  m["seed"] = std::to_string(seed);
  if (kind == ExperimentKind::DivCurl) {
    m["divcurl.trials"] = std::to_string(divcurl_trials);
    m["divcurl.grid"] = std::to_string(divcurl_grid);
    m["divcurl.modes"] = std::to_string(divcurl_modes);
    return m;
  }
  m["target.kind"] = std::string(to_string(target));
  if (target == TargetKind::Flat) m["target.ambient_dim"] = std::to_string(ambient_dim);
  m["grid.dr"] = format_double(dr);
  m["grid.r_max"] = format_double(r_max);
  m["time.t_end"] = format_double(t_end);
  m["time.cfl"] = format_double(cfl);
  m["data.family"] = std::string(to_string(data.family));
  m["data.amplitude"] = format_double(data.amplitude);
  m["data.width"] = format_double(data.width);
  m["data.center"] = format_double(data.center);
  m["output.save_every"] = std::to_string(save_every);
  m["solver.blowup_cap"] = format_double(blowup_cap);
  m["output.dir"] = output_dir;
  m["gauge.enabled"] = b(gauge_enabled);
  m["gauge.antisymmetrize"] = b(antisymmetrize);
  m["estimates.alpha"] = format_double(params.alpha);
  m["estimates.beta"] = format_double(params.beta);
  m["estimates.sigma"] = format_double(params.sigma);
  m["estimates.absorption_margin"] = format_double(params.absorption_margin);
  m["estimates.h2_enabled"] = b(h2_enabled);
  if (kind == ExperimentKind::Convergence) m["experiment.levels"] = std::to_string(levels);
  if (kind == ExperimentKind::Sweep) {
    std::string s;
    for (double a : amplitudes) s += (s.empty() ? "" : ",") + format_double(a);
    m["experiment.amplitudes"] = s;
  }
  return m;
}

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("<syntax>", e.what());
  }
  Flat flat;
  if (!root.IsNull()) flatten(root, "", flat);
  for (const auto& kv : flat)
    if (!known_keys().count(kv.first)) throw ConfigError(kv.first, "unknown key");

  RunConfig c;
  std::string s;
  if (flat.count("experiment.kind")) c.kind = parse_experiment_kind(get<std::string>(flat, "experiment.kind"));
  read(flat, "seed", c.seed);
  read(flat, "divcurl.trials", c.divcurl_trials);
  read(flat, "divcurl.grid", c.divcurl_grid);
  read(flat, "divcurl.modes", c.divcurl_modes);
  if (c.kind != ExperimentKind::DivCurl) {
    require(flat, "target.kind", s);
    c.target = parse_target_kind(s);
    if (c.target == TargetKind::Flat) require(flat, "target.ambient_dim", c.ambient_dim);
    else if (flat.count("target.ambient_dim"))
      throw ConfigError("target.ambient_dim", "only meaningful for the flat target");
    require(flat, "grid.dr", c.dr);
    require(flat, "grid.r_max", c.r_max);
    require(flat, "time.t_end", c.t_end);
    require(flat, "time.cfl", c.cfl);
    require(flat, "data.family", s);
    c.data.family = parse_data_family(s);
    if (c.data.family != DataFamily::Zero) {
      require(flat, "data.amplitude", c.data.amplitude);
      require(flat, "data.width", c.data.width);
    } else {
      read(flat, "data.amplitude", c.data.amplitude);
      read(flat, "data.width", c.data.width);
    }
    read(flat, "data.center", c.data.center);
  }
  read(flat, "solver.blowup_cap", c.blowup_cap);
  read(flat, "output.save_every", c.save_every);
  read(flat, "output.dir", c.output_dir);
  read(flat, "gauge.enabled", c.gauge_enabled);
  read(flat, "gauge.antisymmetrize", c.antisymmetrize);
  read(flat, "estimates.alpha", c.params.alpha);
  read(flat, "estimates.beta", c.params.beta);
  read(flat, "estimates.sigma", c.params.sigma);
  read(flat, "estimates.absorption_margin", c.params.absorption_margin);
  read(flat, "estimates.h2_enabled", c.h2_enabled);
  read(flat, "experiment.levels", c.levels);
  if (flat.count("experiment.amplitudes")) c.amplitudes = read_list(flat, "experiment.amplitudes");
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace wavemap
