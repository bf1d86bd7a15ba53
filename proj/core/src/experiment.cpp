#include "risce/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

#include "risce/baseline_estimators.hpp"
#include "risce/channel_model.hpp"
#include "risce/subspace.hpp"

namespace risce {

namespace {

constexpr std::pair<Estimator, std::string_view> kEstimatorNames[] = {
    {Estimator::kLs, "ls"},       {Estimator::kBinary, "binary"}, {Estimator::kSmv, "smv"},
    {Estimator::kSSmv, "s-smv"},  {Estimator::kMmv, "mmv"},       {Estimator::kSMmv, "s-mmv"},
    {Estimator::kSMjce, "s-mjce"}, {Estimator::kSGenieLs, "s-genie-ls"},
};

constexpr std::pair<SweepAxis, std::string_view> kAxisNames[] = {
    {SweepAxis::kB, "B"},
    {SweepAxis::kPowerDb, "P_dB"},
    {SweepAxis::kNf, "N_f"},
    {SweepAxis::kLambdaD, "lambda_d"},
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

std::string_view to_string(SweepAxis axis) {
  for (const auto& [a, n] : kAxisNames)
    if (a == axis) return n;
  return "?";
}

std::string_view to_string(Estimator e) {
  for (const auto& [x, n] : kEstimatorNames)
    if (x == e) return n;
  return "?";
}

SweepAxis parse_sweep_axis(std::string_view name) {
  for (const auto& [a, n] : kAxisNames)
    if (n == name) return a;
  throw InvalidArgument("unknown sweep axis '" + std::string(name) + "'");
}

Estimator parse_estimator(std::string_view name) {
  for (const auto& [e, n] : kEstimatorNames)
    if (n == name) return e;
  throw InvalidArgument("unknown estimator '" + std::string(name) + "'");
}

std::vector<Estimator> all_estimators() {
  std::vector<Estimator> out;
  for (const auto& [e, n] : kEstimatorNames) out.push_back(e);
  return out;
}

void ExperimentSpec::validate() const {
  if (trials < 1) throw InvalidArgument("experiment: trials must be >= 1");
  if (sweep_values.empty()) throw InvalidArgument("experiment: sweep_values must be nonempty");
  if (estimators.empty()) throw InvalidArgument("experiment: no estimators selected");
  if (workers < 1) throw InvalidArgument("experiment: workers must be >= 1");
  if (reflection_sweeps < 0) throw InvalidArgument("experiment: reflection_sweeps must be >= 0");
  if (mjce_init != Estimator::kSMmv && mjce_init != Estimator::kSmv)
    throw InvalidArgument("experiment: mjce init must be s-mmv or smv");
  for (double v : sweep_values) config_at(v).validate();
}

SystemConfig ExperimentSpec::config_at(double v) const {
  SystemConfig cfg = base;
  auto as_count = [&](double x) {
    if (x < 1.0 || std::floor(x) != x)
      throw InvalidArgument("experiment: sweep value " + std::to_string(x) + " is not a count");
    return static_cast<int>(x);
  };
  switch (sweep_axis) {
    case SweepAxis::kB: cfg.B = as_count(v); break;
    case SweepAxis::kPowerDb: cfg.P = std::pow(10.0, v / 10.0); break;
    case SweepAxis::kNf: cfg.N_f = as_count(v); break;
    case SweepAxis::kLambdaD: cfg.d = v; break;
  }
  return cfg;
}

const ResultRow* ResultTable::find(double sweep_value, std::string_view estimator) const {
  for (const auto& r : rows)
    if (r.sweep_value == sweep_value && r.estimator == estimator) return &r;
  return nullptr;
}

double nmse(const std::vector<CMat>& G_hat_all, const std::vector<CMat>& G_all) {
  if (G_hat_all.size() != G_all.size() || G_all.empty())
    throw InvalidArgument("nmse: estimate and truth user counts differ");
  double acc = 0.0;
  for (std::size_t k = 0; k < G_all.size(); ++k) {
    if (G_hat_all[k].rows() != G_all[k].rows() || G_hat_all[k].cols() != G_all[k].cols())
      throw InvalidArgument("nmse: shape mismatch");
    const double den = G_all[k].squaredNorm();
    if (den == 0.0) throw InvalidArgument("nmse: zero-norm ground truth");
    acc += (G_hat_all[k] - G_all[k]).squaredNorm() / den;
  }
  return acc / static_cast<double>(G_all.size());
}

TrialOutcome run_trial(const SystemConfig& cfg, const ExperimentSpec& spec, Rng& channel_rng,
                       Rng& training_rng, Rng& aux_rng) {
  const ChannelRealization chan = sample_channels(cfg, channel_rng);
  const AngularDictionary dict = build_dictionary(cfg);

  TrainingDesign td;
  td.S = generate_pilots(cfg.K, cfg.T, cfg.P);
  td.V = generate_reflections(cfg.L, cfg.B, spec.reflection_mode, training_rng, &dict.A_R,
                              spec.reflection_sweeps);
  td.P = cfg.P;
  td.noise_var = cfg.noise_var;
  const ReceivedBlocks rx = simulate_uplink(chan, td, training_rng);
  const CMat D = td.V.adjoint() * dict.A_R;
  const double eps_full = noise_energy_threshold(cfg.M, cfg.B, cfg.noise_var, cfg.P, cfg.T);

  // Shared first step of every subspace-based estimator, computed on demand.
  std::optional<SubspaceEstimate> sub;
  std::vector<CMat> Ybar;
  double subspace_time = 0.0;
  auto ensure_subspace = [&] {
    if (sub) return;
    const auto t0 = Clock::now();
    sub = estimate_subspace_from_blocks(rx.Y, spec.nf_override);
    for (const auto& Yt : rx.Ytil) Ybar.push_back(project(Yt, sub->S_par));
    subspace_time = seconds_since(t0);
  };
  std::optional<std::vector<CMat>> smmv;
  double smmv_time = 0.0;
  auto ensure_smmv = [&] {
    if (smmv) return;
    ensure_subspace();
    const auto t0 = Clock::now();
    const double eps = noise_energy_threshold(sub->N_hat, cfg.B, cfg.noise_var, cfg.P, cfg.T);
    std::vector<CMat> G;
    for (const auto& Yb : Ybar)
      G.push_back(dict.A_R * somp_recover(Yb.adjoint(), D, eps).X * sub->S_par.adjoint());
    smmv = std::move(G);
    smmv_time = seconds_since(t0);
  };

  std::optional<std::vector<CMat>> smv;
  double smv_time = 0.0;
  auto ensure_smv = [&] {
    if (smv) return;
    const auto t0 = Clock::now();
    std::vector<CMat> G;
    for (const auto& Yt : rx.Ytil) G.push_back(smv_omp_estimate(Yt, td.V, dict, eps_full).G_hat);
    smv = std::move(G);
    smv_time = seconds_since(t0);
  };

  TrialOutcome out;
  for (Estimator e : spec.estimators) {
    const auto t0 = Clock::now();
    double extra = 0.0;
    std::vector<CMat> G_hat;
    try {
      switch (e) {
        case Estimator::kLs:
          for (const auto& Yt : rx.Ytil) G_hat.push_back(ls_estimate(Yt, td.V));
          break;
        case Estimator::kBinary:
          G_hat = binary_reflection_estimate(chan, cfg, aux_rng).G_hat;
          break;
        case Estimator::kSmv:
          ensure_smv();
          extra = smv_time;
          G_hat = *smv;
          break;
        case Estimator::kMmv:
          for (const auto& Yt : rx.Ytil)
            G_hat.push_back(mmv_somp_estimate(Yt, td.V, dict.A_R, eps_full).G_hat);
          break;
        case Estimator::kSSmv: {
          ensure_subspace();
          extra = subspace_time;
          const double eps = noise_energy_threshold(sub->N_hat, cfg.B, cfg.noise_var, cfg.P, cfg.T);
          const CMat I = CMat::Identity(sub->N_hat, sub->N_hat);
          for (const auto& Yb : Ybar)
            G_hat.push_back(dict.A_R * omp_recover(Yb.adjoint(), D, I, eps).X * sub->S_par.adjoint());
          break;
        }
        case Estimator::kSMmv:
          ensure_smmv();
          extra = subspace_time + smmv_time;
          G_hat = *smmv;
          break;
        case Estimator::kSMjce: {
          ensure_subspace();
          const std::vector<CMat>* init = nullptr;
          if (spec.mjce_init == Estimator::kSmv) {
            ensure_smv();
            extra = subspace_time + smv_time;
            init = &*smv;
          } else {
            ensure_smmv();
            extra = subspace_time + smmv_time;
            init = &*smmv;
          }
          std::vector<CVec> alpha0;
          try {
            alpha0 = init_alpha(*init);
          } catch (const DegenerateChannel&) {
            alpha0.clear();  // fall back to all-ones scaling
          }
          MjceOptions opts = spec.mjce;
          opts.lambda = penalty_lambda(cfg.P, cfg.T, cfg.d, cfg.noise_var, cfg.G_r);
          opts.varsigma = cfg.varsigma;
          opts.trace = nullptr;
          G_hat = run_mjce(Ybar, td.V, dict.A_R, sub->S_par, std::move(alpha0), opts).G_hat;
          break;
        }
        case Estimator::kSGenieLs:
          for (int k = 0; k < cfg.K; ++k)
            G_hat.push_back(genie_ls_estimate(chan, k, rx.Ytil[k], td.V));
          break;
      }
      out.nmse.push_back(nmse(G_hat, chan.G));
      out.errors.emplace_back();
    } catch (const std::exception& ex) {
      out.nmse.push_back(std::numeric_limits<double>::quiet_NaN());
      out.errors.emplace_back(ex.what());
    }
    out.wall_time.push_back(seconds_since(t0) + extra);
  }
  return out;
}

ResultTable run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const std::size_t n_sweep = spec.sweep_values.size();
  const std::size_t n_trials = static_cast<std::size_t>(spec.trials);
  const std::size_t n_tasks = n_sweep * n_trials;
  std::vector<TrialOutcome> outcomes(n_tasks);

  // Channels depend on the trial index only, so every sweep point sees the
  // same channel draws.
  auto work = [&](std::size_t task) {
    const std::size_t s = task / n_trials;
    const std::size_t t = task % n_trials;
    Rng channel_rng = make_stream({spec.seed, 0, t});
    Rng training_rng = make_stream({spec.seed, 1, s, t});
    Rng aux_rng = make_stream({spec.seed, 2, s, t});
    outcomes[task] =
        run_trial(spec.config_at(spec.sweep_values[s]), spec, channel_rng, training_rng, aux_rng);
  };

  const int workers = std::min<int>(spec.workers, static_cast<int>(n_tasks));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n_tasks; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n_tasks; i = next++) work(i);
      });
  }

  ResultTable table;
  for (std::size_t s = 0; s < n_sweep; ++s) {
    for (std::size_t e = 0; e < spec.estimators.size(); ++e) {
      ResultRow row;
      row.sweep_value = spec.sweep_values[s];
      row.estimator = std::string(to_string(spec.estimators[e]));
      double time_sum = 0.0;
      for (std::size_t t = 0; t < n_trials; ++t) {
        const TrialOutcome& o = outcomes[s * n_trials + t];
        time_sum += o.wall_time[e];
        if (std::isnan(o.nmse[e]))
          ++row.trials_failed;
        else
          row.nmse_samples.push_back(o.nmse[e]);
      }
      const std::size_t n = row.nmse_samples.size();
      if (n == 0) {
        row.mean_nmse = std::numeric_limits<double>::quiet_NaN();
        row.std_nmse = std::numeric_limits<double>::quiet_NaN();
      } else {
        row.mean_nmse = std::accumulate(row.nmse_samples.begin(), row.nmse_samples.end(), 0.0) / n;
        double ss = 0.0;
        for (double x : row.nmse_samples) ss += (x - row.mean_nmse) * (x - row.mean_nmse);
        row.std_nmse = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
      }
      row.mean_wall_time = spec.record_timing ? time_sum / static_cast<double>(n_trials) : 0.0;
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

void write_csv(const ResultTable& table, std::ostream& os) {
  os << kCsvHeader << '\n';
  char buf[256];
  for (const auto& r : table.rows) {
    std::snprintf(buf, sizeof buf, "%.10g,%s,%.6e,%.6e,%.6e,%d\n", r.sweep_value, r.estimator.c_str(),
                  r.mean_nmse, r.std_nmse, r.mean_wall_time, r.trials_failed);
    os << buf;
  }
}

void emit_csv(const ResultTable& table, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_csv(table, os);
  os.flush();
  if (!os) throw std::runtime_error("write to '" + path.string() + "' failed");
}

ResultTable parse_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader)
    throw InvalidArgument("parse_csv: missing or unexpected header");
  ResultTable table;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 6) throw InvalidArgument("parse_csv: expected 6 fields in '" + line + "'");
    ResultRow r;
    r.sweep_value = std::stod(f[0]);
    r.estimator = f[1];
    r.mean_nmse = std::stod(f[2]);
    r.std_nmse = std::stod(f[3]);
    r.mean_wall_time = std::stod(f[4]);
    r.trials_failed = std::stoi(f[5]);
    table.rows.push_back(std::move(r));
  }
  return table;
}

}  // namespace risce
