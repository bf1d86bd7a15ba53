#include "risce/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace risce {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <typename T>
void read(const json& obj, const char* key, T& dst, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    dst = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

void read_system(const json& j, SystemConfig& cfg) {
  if (!j.is_object()) throw ConfigError("system: expected an object");
  reject_unknown(j,
                 {"M", "L", "K", "T", "B", "P", "P_dB", "noise_var", "G_r", "G_t", "N_f", "N_h",
                  "varsigma", "d"},
                 "system");
  if (j.contains("P") && j.contains("P_dB")) throw ConfigError("system: give P or P_dB, not both");
  read(j, "M", cfg.M, "system");
  read(j, "L", cfg.L, "system");
  read(j, "K", cfg.K, "system");
  read(j, "T", cfg.T, "system");
  read(j, "B", cfg.B, "system");
  read(j, "P", cfg.P, "system");
  if (j.contains("P_dB")) {
    double db = 0.0;
    read(j, "P_dB", db, "system");
    cfg.P = std::pow(10.0, db / 10.0);
  }
  read(j, "noise_var", cfg.noise_var, "system");
  read(j, "G_r", cfg.G_r, "system");
  read(j, "G_t", cfg.G_t, "system");
  read(j, "N_f", cfg.N_f, "system");
  read(j, "N_h", cfg.N_h, "system");
  read(j, "varsigma", cfg.varsigma, "system");
  read(j, "d", cfg.d, "system");
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss{std::string(s)};
  for (std::string cell; std::getline(ss, cell, sep);) out.push_back(trim(cell));
  return out;
}

}  // namespace

ReflectionMode parse_reflection_mode(std::string_view name) {
  if (name == "random") return ReflectionMode::kRandom;
  if (name == "optimized") return ReflectionMode::kOptimized;
  throw ConfigError("unknown reflection mode '" + std::string(name) + "'");
}

std::vector<Estimator> parse_estimator_list(std::string_view text) {
  std::vector<Estimator> out;
  for (const auto& name : split(text, ',')) {
    if (name.empty()) continue;
    try {
      out.push_back(parse_estimator(name));
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }
  if (out.empty()) throw ConfigError("estimator list is empty");
  return out;
}

void apply_sweep_override(ExperimentSpec& spec, std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) throw ConfigError("sweep override must look like AXIS=v1,v2,...");
  try {
    spec.sweep_axis = parse_sweep_axis(trim(text.substr(0, eq)));
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  spec.sweep_values.clear();
  for (const auto& v : split(text.substr(eq + 1), ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != v.size()) throw ConfigError("sweep value '" + v + "' is not a number");
    spec.sweep_values.push_back(x);
  }
  if (spec.sweep_values.empty()) throw ConfigError("sweep override has no values");
}

ExperimentSpec parse_spec(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown(j,
                 {"system", "sweep", "estimators", "trials", "seed", "reflections", "reflection_sweeps",
                  "nf_override", "workers", "timing", "mjce"},
                 "config");

  ExperimentSpec spec;
  if (j.contains("system")) read_system(j["system"], spec.base);
  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    if (!s.is_object()) throw ConfigError("sweep: expected an object");
    reject_unknown(s, {"axis", "values"}, "sweep");
    std::string axis = "B";
    read(s, "axis", axis, "sweep");
    try {
      spec.sweep_axis = parse_sweep_axis(axis);
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
    read(s, "values", spec.sweep_values, "sweep");
  } else {
    spec.sweep_values = {static_cast<double>(spec.base.B)};
  }
  if (j.contains("estimators")) {
    std::vector<std::string> names;
    read(j, "estimators", names, "config");
    spec.estimators.clear();
    for (const auto& n : names) {
      try {
        spec.estimators.push_back(parse_estimator(n));
      } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
      }
    }
  }
  read(j, "trials", spec.trials, "config");
  read(j, "seed", spec.seed, "config");
  spec.base.seed = spec.seed;
  if (j.contains("reflections")) {
    std::string mode;
    read(j, "reflections", mode, "config");
    spec.reflection_mode = parse_reflection_mode(mode);
  }
  read(j, "reflection_sweeps", spec.reflection_sweeps, "config");
  read(j, "nf_override", spec.nf_override, "config");
  read(j, "workers", spec.workers, "config");
  read(j, "timing", spec.record_timing, "config");
  if (j.contains("mjce")) {
    const json& m = j["mjce"];
    if (!m.is_object()) throw ConfigError("mjce: expected an object");
    reject_unknown(m, {"inner_tol", "outer_tol", "max_inner", "max_outer", "init"}, "mjce");
    if (m.contains("init")) {
      std::string init;
      read(m, "init", init, "mjce");
      try {
        spec.mjce_init = parse_estimator(init);
      } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
      }
    }
    read(m, "inner_tol", spec.mjce.inner_tol, "mjce");
    read(m, "outer_tol", spec.mjce.outer_tol, "mjce");
    read(m, "max_inner", spec.mjce.max_inner, "mjce");
    read(m, "max_outer", spec.mjce.max_outer, "mjce");
  }

  try {
    spec.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config '" + path.string() + "'");
  std::stringstream buf;
  buf << is.rdbuf();
  return parse_spec(buf.str());
}

}  // namespace risce
