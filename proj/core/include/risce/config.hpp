#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "risce/experiment.hpp"

namespace risce {

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses a JSON experiment description. Unknown keys are rejected.
///
///   {
///     "system": {"M": 32, "L": 32, "K": 4, "T": 4, "B": 16, "P_dB": 10,
///                "noise_var": 1, "G_r": 128, "G_t": 128, "N_f": 4, "N_h": 1,
///                "varsigma": 1e-9, "d": 0.1},
///     "sweep": {"axis": "B", "values": [8, 16, 24, 32]},
///     "estimators": ["mmv", "s-mjce"],
///     "trials": 50, "seed": 7, "reflections": "random",
///     "reflection_sweeps": 3, "nf_override": 0, "workers": 1, "timing": true,
///     "mjce": {"inner_tol": 1e-6, "outer_tol": 1e-5, "max_inner": 30, "max_outer": 50,
///              "init": "s-mmv"}
///   }
ExperimentSpec parse_spec(std::string_view json_text);
ExperimentSpec load_spec(const std::filesystem::path& path);

/// "B=8,16,24" -> axis and values.
void apply_sweep_override(ExperimentSpec& spec, std::string_view text);
/// "s-mjce,mmv" -> estimator list.
std::vector<Estimator> parse_estimator_list(std::string_view text);
ReflectionMode parse_reflection_mode(std::string_view name);

}  // namespace risce
