#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "risce/mjce.hpp"
#include "risce/training_protocol.hpp"
#include "risce/types.hpp"

namespace risce {

enum class SweepAxis { kB, kPowerDb, kNf, kLambdaD };

enum class Estimator { kLs, kBinary, kSmv, kSSmv, kMmv, kSMmv, kSMjce, kSGenieLs };

std::string_view to_string(SweepAxis axis);
std::string_view to_string(Estimator e);
SweepAxis parse_sweep_axis(std::string_view name);
Estimator parse_estimator(std::string_view name);
std::vector<Estimator> all_estimators();

/// Monte-Carlo experiment: one base configuration, one swept parameter.
struct ExperimentSpec {
  SystemConfig base;
  SweepAxis sweep_axis = SweepAxis::kB;
  std::vector<double> sweep_values{16};
  std::vector<Estimator> estimators = all_estimators();
  int trials = 10;
  ReflectionMode reflection_mode = ReflectionMode::kRandom;
  int reflection_sweeps = 3;
  std::uint64_t seed = 1;
  int nf_override = 0;  // > 0 replaces the MDL order estimate
  int workers = 1;
  bool record_timing = true;  // false writes zero times, making the CSV reproducible
  MjceOptions mjce;           // lambda is recomputed from the system parameters
  Estimator mjce_init = Estimator::kSMmv;  // source of the initial scaling estimates: s-mmv or smv

  void validate() const;
  /// System configuration for one sweep point.
  SystemConfig config_at(double sweep_value) const;
};

struct ResultRow {
  double sweep_value = 0.0;
  std::string estimator;
  double mean_nmse = 0.0;
  double std_nmse = 0.0;
  double mean_wall_time = 0.0;
  int trials_failed = 0;
  std::vector<double> nmse_samples;  // successful trials, trial order; not serialised
};

struct ResultTable {
  std::vector<ResultRow> rows;

  const ResultRow* find(double sweep_value, std::string_view estimator) const;
};

/// Mean over users of ||G_hat_k - G_k||_F^2 / ||G_k||_F^2.
double nmse(const std::vector<CMat>& G_hat_all, const std::vector<CMat>& G_all);

/// Outcome of every requested estimator on one channel/noise draw.
struct TrialOutcome {
  std::vector<double> nmse;       // NaN when the estimator failed
  std::vector<double> wall_time;  // seconds
  std::vector<std::string> errors;
};

/// Runs one trial. Channels come from `channel_rng`, reflections and noise
/// from `training_rng`, the binary-reflection re-run from `aux_rng`.
TrialOutcome run_trial(const SystemConfig& cfg, const ExperimentSpec& spec, Rng& channel_rng,
                       Rng& training_rng, Rng& aux_rng);

/// Deterministic for a given spec regardless of `workers`.
ResultTable run_experiment(const ExperimentSpec& spec);

inline constexpr std::string_view kCsvHeader = "sweep,estimator,mean_nmse,std_nmse,mean_time_s,failed";

void write_csv(const ResultTable& table, std::ostream& os);
void emit_csv(const ResultTable& table, const std::filesystem::path& path);
ResultTable parse_csv(std::istream& is);

}  // namespace risce
