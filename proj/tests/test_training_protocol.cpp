#include <doctest.h>

#include <cmath>

#include "risce/channel_model.hpp"
#include "risce/reflection_design.hpp"
#include "risce/training_protocol.hpp"
#include "test_util.hpp"

using namespace risce;

TEST_CASE("pilots are orthogonal with energy PT") {
  const CMat S2 = generate_pilots(2, 2, 1.0);
  CHECK(S2.row(0).squaredNorm() == doctest::Approx(2.0));
  CHECK(std::abs(S2.row(0).dot(S2.row(1))) < 1e-12);

  const CMat S = generate_pilots(4, 8, 2.0);
  for (int k = 0; k < 4; ++k) CHECK(S.row(k).squaredNorm() == doctest::Approx(16.0));
  CHECK((S * S.adjoint() - 16.0 * CMat::Identity(4, 4)).norm() < 1e-9);
  CHECK_THROWS_AS(generate_pilots(4, 3, 1.0), InvalidArgument);
}

TEST_CASE("reflections are unit modulus and reproducible") {
  Rng a = make_stream({9}), b = make_stream({9});
  const CMat V1 = random_reflections(6, 5, a);
  const CMat V2 = random_reflections(6, 5, b);
  CHECK((V1 - V2).norm() == 0.0);
  CHECK((V1.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);

  const CMat A = steering_matrix(8, uniform_grid(16));
  Rng c = make_stream({10});
  const CMat Vo = generate_reflections(8, 4, ReflectionMode::kOptimized, c, &A);
  CHECK((Vo.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
  Rng d = make_stream({10});
  CHECK_THROWS_AS(generate_reflections(8, 4, ReflectionMode::kOptimized, d, nullptr), InvalidArgument);
}

TEST_CASE("optimized reflections against an identity dictionary") {
  const CMat I = CMat::Identity(4, 4);
  std::vector<double> mus;
  Rng rng = make_stream({11});
  for (int i = 0; i < 100; ++i)
    mus.push_back(mutual_coherence(random_reflections(4, 4, rng).adjoint() * I).mu);
  Rng r2 = make_stream({12});
  const CMat Vo = generate_reflections(4, 4, ReflectionMode::kOptimized, r2, &I);
  CHECK(mutual_coherence(Vo.adjoint() * I).mu <= testutil::median(mus));
}

namespace {

struct Setup {
  SystemConfig cfg;
  ChannelRealization chan;
  TrainingDesign td;
};

Setup make_setup(int K, int B, double noise_var, std::uint64_t seed) {
  Setup s;
  s.cfg.M = 6;
  s.cfg.L = 5;
  s.cfg.K = K;
  s.cfg.T = 4;
  s.cfg.B = B;
  s.cfg.N_f = 2;
  Rng rng = make_stream({seed});
  s.chan = sample_channels(s.cfg, rng);
  s.td.S = generate_pilots(K, s.cfg.T, s.cfg.P);
  s.td.V = random_reflections(s.cfg.L, B, rng);
  s.td.P = s.cfg.P;
  s.td.noise_var = noise_var;
  return s;
}

}  // namespace

TEST_CASE("noiseless single-user uplink") {
  Setup s = make_setup(1, 1, 0.0, 1);
  Rng rng = make_stream({2});
  const ReceivedBlocks rx = simulate_uplink(s.chan, s.td, rng);
  REQUIRE(rx.Y.size() == 1);
  const CMat expect = s.chan.G[0].adjoint() * s.td.V.col(0) * s.td.S.row(0);
  CHECK((rx.Y[0] - expect).norm() < 1e-12);
}

TEST_CASE("noiseless multi-user despreading is exact") {
  Setup s = make_setup(3, 7, 0.0, 5);
  Rng rng = make_stream({6});
  const ReceivedBlocks rx = simulate_uplink(s.chan, s.td, rng);
  REQUIRE(rx.Y.size() == 7);
  REQUIRE(rx.Ytil.size() == 3);
  for (const auto& Y : rx.Y) {
    CHECK(Y.rows() == 6);
    CHECK(Y.cols() == 4);
  }
  for (int k = 0; k < 3; ++k) {
    CHECK(rx.Ytil[k].rows() == 6);
    CHECK(rx.Ytil[k].cols() == 7);
    CHECK((rx.Ytil[k] - s.chan.G[k].adjoint() * s.td.V).norm() < 1e-10);
    for (int b = 0; b < 7; ++b) {
      const CVec d = despread(rx.Y[b], s.td.pilot(k), s.td.P, s.td.pilot_length());
      CHECK((d - rx.Ytil[k].col(b)).norm() < 1e-12);
    }
  }
}

TEST_CASE("receiver and de-spread noise variances") {
  Setup s = make_setup(2, 4, 1.0, 8);
  s.chan.G.assign(2, CMat::Zero(5, 6));
  Rng rng = make_stream({13});
  double raw = 0.0, desp = 0.0;
  long raw_n = 0, desp_n = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const ReceivedBlocks rx = simulate_uplink(s.chan, s.td, rng);
    for (const auto& Y : rx.Y) {
      raw += Y.squaredNorm();
      raw_n += Y.size();
    }
    desp += rx.Ytil[0].squaredNorm();
    desp_n += rx.Ytil[0].size();
  }
  CHECK(raw / raw_n == doctest::Approx(1.0).epsilon(0.03));
  const double PT = s.td.P * s.td.pilot_length();
  CHECK(desp / desp_n == doctest::Approx(1.0 / PT).epsilon(0.05));
  // Total de-spread noise energy per user, M B noise_var / (PT).
  CHECK(desp / draws == doctest::Approx(6.0 * 4.0 / PT).epsilon(0.05));
}
