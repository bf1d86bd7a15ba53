// Command-line driver: Monte-Carlo NMSE sweeps and reflection coherence reports.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "risce/channel_model.hpp"
#include "risce/config.hpp"
#include "risce/experiment.hpp"
#include "risce/reflection_design.hpp"
#include "risce/training_protocol.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kRuntimeError = 3 };

struct RunArgs {
  std::string config;
  std::string sweep;
  std::string estimators;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string reflections;
  std::optional<int> nf_override;
  std::optional<int> workers;
  bool no_timing = false;
};

struct CoherenceArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  int restarts = 1;
};

risce::ExperimentSpec build_spec(const RunArgs& a) {
  risce::ExperimentSpec spec = risce::load_spec(a.config);
  if (!a.sweep.empty()) risce::apply_sweep_override(spec, a.sweep);
  if (!a.estimators.empty()) spec.estimators = risce::parse_estimator_list(a.estimators);
  if (a.trials) spec.trials = *a.trials;
  if (a.seed) spec.seed = spec.base.seed = *a.seed;
  if (!a.reflections.empty()) spec.reflection_mode = risce::parse_reflection_mode(a.reflections);
  if (a.nf_override) spec.nf_override = *a.nf_override;
  if (a.workers) spec.workers = *a.workers;
  if (a.no_timing) spec.record_timing = false;
  try {
    spec.validate();
  } catch (const risce::InvalidArgument& e) {
    throw risce::ConfigError(e.what());
  }
  return spec;
}

int cmd_run(const RunArgs& a) {
  const risce::ExperimentSpec spec = build_spec(a);
  const risce::ResultTable table = risce::run_experiment(spec);
  if (a.out.empty())
    risce::write_csv(table, std::cout);
  else
    risce::emit_csv(table, a.out);
  return kOk;
}

void print_report(const char* label, const risce::CoherenceReport& r) {
  std::printf("%-10s mu=%.6f worst=(%d,%d) offdiag_energy=%.6e\n", label, r.mu, r.worst_pair.first,
              r.worst_pair.second, r.gram_offdiag_energy);
}

int cmd_coherence(const CoherenceArgs& a) {
  risce::ExperimentSpec spec = risce::load_spec(a.config);
  if (a.seed) spec.seed = *a.seed;
  if (a.restarts < 1) throw risce::ConfigError("--restarts must be >= 1");
  const risce::SystemConfig& cfg = spec.base;
  const risce::AngularDictionary dict = risce::build_dictionary(cfg);
  std::printf("L=%d B=%d G_r=%d sweeps=%d\n", cfg.L, cfg.B, cfg.G_r, spec.reflection_sweeps);
  for (int r = 0; r < a.restarts; ++r) {
    risce::Rng rng = risce::make_stream({spec.seed, 3, static_cast<std::uint64_t>(r)});
    const risce::CMat V0 = risce::random_reflections(cfg.L, cfg.B, rng);
    const risce::CMat V1 = risce::optimize_reflections(dict.A_R, V0, spec.reflection_sweeps).V;
    if (a.restarts > 1) std::printf("restart %d\n", r);
    print_report("random", risce::mutual_coherence(V0.adjoint() * dict.A_R));
    print_report("optimized", risce::mutual_coherence(V1.adjoint() * dict.A_R));
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS cascaded-channel estimation experiments"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a Monte-Carlo sweep and write CSV");
  run_cmd->add_option("--config", run.config, "JSON experiment file")->required();
  run_cmd->add_option("--sweep", run.sweep, "Override sweep, e.g. B=8,16,24,32");
  run_cmd->add_option("--estimators", run.estimators, "Comma-separated estimator names");
  run_cmd->add_option("--trials", run.trials, "Monte-Carlo trials per sweep value");
  run_cmd->add_option("--seed", run.seed, "Master seed");
  run_cmd->add_option("--out", run.out, "CSV output path (stdout when omitted)");
  run_cmd->add_option("--reflections", run.reflections, "random | optimized");
  run_cmd->add_option("--nf-override", run.nf_override, "Fix the subspace order instead of MDL");
  run_cmd->add_option("--workers", run.workers, "Worker threads");
  run_cmd->add_flag("--no-timing", run.no_timing, "Write zero wall times (reproducible CSV)");

  CoherenceArgs coh;
  auto* coh_cmd = app.add_subcommand("coherence", "Mutual coherence of random vs optimised V");
  coh_cmd->add_option("--config", coh.config, "JSON experiment file")->required();
  coh_cmd->add_option("--seed", coh.seed, "Master seed");
  coh_cmd->add_option("--restarts", coh.restarts, "Independent random starts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    return cmd_coherence(coh);
  } catch (const risce::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}
