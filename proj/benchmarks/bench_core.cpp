#include <benchmark/benchmark.h>

#include "risce/baseline_estimators.hpp"
#include "risce/channel_model.hpp"
#include "risce/mjce.hpp"
#include "risce/reflection_design.hpp"
#include "risce/subspace.hpp"
#include "risce/training_protocol.hpp"

using namespace risce;

namespace {

SystemConfig reduced(int B) {
  SystemConfig cfg;
  cfg.M = cfg.L = 32;
  cfg.K = cfg.T = 4;
  cfg.B = B;
  cfg.G_r = cfg.G_t = 128;
  cfg.N_f = 4;
  cfg.N_h = 1;
  return cfg;
}

struct Scenario {
  SystemConfig cfg;
  AngularDictionary dict;
  ChannelRealization chan;
  TrainingDesign td;
  ReceivedBlocks rx;
  SubspaceEstimate sub;
  std::vector<CMat> Ybar;

  explicit Scenario(int B) : cfg(reduced(B)), dict(build_dictionary(cfg)) {
    Rng rng = make_stream({42});
    chan = sample_channels(cfg, rng);
    td.S = generate_pilots(cfg.K, cfg.T, cfg.P);
    td.V = random_reflections(cfg.L, cfg.B, rng);
    td.P = cfg.P;
    td.noise_var = cfg.noise_var;
    rx = simulate_uplink(chan, td, rng);
    sub = estimate_subspace_from_blocks(rx.Y);
    for (const auto& Yt : rx.Ytil) Ybar.push_back(project(Yt, sub.S_par));
  }
};

void BM_SampleChannels(benchmark::State& state) {
  const SystemConfig cfg = reduced(16);
  Rng rng = make_stream({1});
  for (auto _ : state) benchmark::DoNotOptimize(sample_channels(cfg, rng));
}
BENCHMARK(BM_SampleChannels);

void BM_Subspace(benchmark::State& state) {
  const Scenario s(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_subspace_from_blocks(s.rx.Y));
}
BENCHMARK(BM_Subspace)->Arg(16)->Arg(64);

void BM_Somp(benchmark::State& state) {
  const Scenario s(static_cast<int>(state.range(0)));
  const CMat D = s.td.V.adjoint() * s.dict.A_R;
  const double eps = noise_energy_threshold(s.sub.N_hat, s.cfg.B, s.cfg.noise_var, s.cfg.P, s.cfg.T);
  for (auto _ : state) benchmark::DoNotOptimize(somp_recover(s.Ybar[0].adjoint(), D, eps));
}
BENCHMARK(BM_Somp)->Arg(8)->Arg(16)->Arg(32);

void BM_OmpSmv(benchmark::State& state) {
  const Scenario s(static_cast<int>(state.range(0)));
  const double eps = noise_energy_threshold(s.cfg.M, s.cfg.B, s.cfg.noise_var, s.cfg.P, s.cfg.T);
  for (auto _ : state) benchmark::DoNotOptimize(smv_omp_estimate(s.rx.Ytil[0], s.td.V, s.dict, eps));
}
BENCHMARK(BM_OmpSmv)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Mjce(benchmark::State& state) {
  const Scenario s(static_cast<int>(state.range(0)));
  const CMat D = s.td.V.adjoint() * s.dict.A_R;
  const double eps = noise_energy_threshold(s.sub.N_hat, s.cfg.B, s.cfg.noise_var, s.cfg.P, s.cfg.T);
  std::vector<CMat> init;
  for (const auto& Yb : s.Ybar)
    init.push_back(s.dict.A_R * somp_recover(Yb.adjoint(), D, eps).X * s.sub.S_par.adjoint());
  const std::vector<CVec> alpha0 = init_alpha(init);
  MjceOptions opts;
  opts.lambda = penalty_lambda(s.cfg.P, s.cfg.T, s.cfg.d, s.cfg.noise_var, s.cfg.G_r);
  for (auto _ : state)
    benchmark::DoNotOptimize(run_mjce(s.Ybar, s.td.V, s.dict.A_R, s.sub.S_par, alpha0, opts));
}
BENCHMARK(BM_Mjce)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_OptimizeReflections(benchmark::State& state) {
  SystemConfig cfg;
  cfg.L = 64;
  cfg.G_r = 256;
  const CMat A_R = build_dictionary(cfg).A_R;
  Rng rng = make_stream({3});
  const CMat V0 = random_reflections(cfg.L, static_cast<int>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(optimize_reflections(A_R, V0, 3));
}
BENCHMARK(BM_OptimizeReflections)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
