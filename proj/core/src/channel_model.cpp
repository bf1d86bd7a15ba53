#include "risce/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace risce {

void SystemConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InvalidArgument(std::string("invalid SystemConfig: ") + what);
  };
  require(M >= 1 && L >= 1 && K >= 1 && T >= 1 && B >= 1, "all counts must be >= 1");
  require(G_r >= 1 && G_t >= 1 && N_f >= 1 && N_h >= 1, "all counts must be >= 1");
  require(T >= K, "pilot length T must be >= K");
  require(P > 0.0, "P must be positive");
  require(noise_var > 0.0, "noise_var must be positive");
  require(G_r >= L, "G_r must be >= L");
  require(varsigma > 0.0, "varsigma must be positive");
}

double wrap_spatial_frequency(double x) {
  double y = std::fmod(x + 1.0, 2.0);
  if (y < 0.0) y += 2.0;
  y -= 1.0;
  // fmod rounding can land exactly on +1
  if (y >= 1.0) y -= 2.0;
  return y;
}

double angle_for_frequency(double freq) {
  double a = std::asin(std::clamp(freq, -1.0, 1.0));
  if (a < 0.0) a += 2.0 * kPi;
  return a;
}

CVec steering_vector(int X, double phi) {
  if (X < 1) throw InvalidArgument("steering_vector: element count must be >= 1");
  CVec a(X);
  const double scale = 1.0 / std::sqrt(static_cast<double>(X));
  for (int n = 0; n < X; ++n) a(n) = std::polar(scale, -kPi * phi * n);
  return a;
}

CMat steering_matrix(int X, const RVec& grid) {
  CMat A(X, grid.size());
  for (Eigen::Index j = 0; j < grid.size(); ++j) A.col(j) = steering_vector(X, grid(j));
  return A;
}

ChannelRealization synthesize_channels(const SystemConfig& cfg, std::vector<BsRisPath> bs_ris,
                                       std::vector<std::vector<RisUserPath>> ris_user) {
  if (bs_ris.empty()) throw InvalidArgument("synthesize_channels: need at least one BS-RIS path");
  if (static_cast<int>(ris_user.size()) != cfg.K)
    throw InvalidArgument("synthesize_channels: one path list per user required");

  ChannelRealization chan;
  const double f_scale =
      std::sqrt(static_cast<double>(cfg.L) * cfg.M / static_cast<double>(bs_ris.size()));
  chan.F = CMat::Zero(cfg.L, cfg.M);
  for (const auto& p : bs_ris) {
    chan.F.noalias() += f_scale * p.gain * steering_vector(cfg.L, spatial_frequency(p.aoa)) *
                        steering_vector(cfg.M, spatial_frequency(p.aod)).adjoint();
  }

  chan.h.reserve(cfg.K);
  chan.G.reserve(cfg.K);
  for (const auto& paths : ris_user) {
    if (paths.empty()) throw InvalidArgument("synthesize_channels: user without paths");
    const double h_scale = std::sqrt(static_cast<double>(cfg.L) / static_cast<double>(paths.size()));
    CVec h = CVec::Zero(cfg.L);
    for (const auto& q : paths) h += h_scale * q.gain * steering_vector(cfg.L, spatial_frequency(q.aod));
    chan.G.push_back(h.conjugate().asDiagonal() * chan.F);
    chan.h.push_back(std::move(h));
  }
  chan.bs_ris_paths = std::move(bs_ris);
  chan.ris_user_paths = std::move(ris_user);
  return chan;
}

ChannelRealization sample_channels(const SystemConfig& cfg, Rng& rng) {
  cfg.validate();
  std::vector<BsRisPath> bs_ris(cfg.N_f);
  for (auto& p : bs_ris) {
    p.gain = complex_gaussian(rng);
    p.aoa = uniform_angle(rng);
    p.aod = uniform_angle(rng);
  }
  std::vector<std::vector<RisUserPath>> ris_user(cfg.K, std::vector<RisUserPath>(cfg.N_h));
  for (auto& user : ris_user) {
    for (auto& q : user) {
      q.gain = complex_gaussian(rng);
      q.aod = uniform_angle(rng);
    }
  }
  return synthesize_channels(cfg, std::move(bs_ris), std::move(ris_user));
}

double cascaded_frequency(const ChannelRealization& chan, int k, int p, int q) {
  const auto& bp = chan.bs_ris_paths.at(p);
  const auto& up = chan.ris_user_paths.at(k).at(q);
  return wrap_spatial_frequency(spatial_frequency(bp.aoa) - spatial_frequency(up.aod));
}

double cascaded_vad_residual(const CMat& G, const AngularDictionary& dict) {
  if (G.rows() != dict.A_R.rows() || G.cols() != dict.A_T.rows())
    throw InvalidArgument("cascaded_vad_residual: shape mismatch");
  const double gnorm = G.norm();
  if (gnorm == 0.0) return 0.0;
  // X = pinv(A_R) G pinv(A_T^H) is the minimum-norm minimiser.
  Eigen::CompleteOrthogonalDecomposition<CMat> left(dict.A_R);
  Eigen::CompleteOrthogonalDecomposition<CMat> right(dict.A_T.adjoint());
  const CMat X = left.pseudoInverse() * G * right.pseudoInverse();
  const CMat fit = dict.A_R * X * dict.A_T.adjoint();
  return (G - fit).norm() / gnorm;
}

ScalingMatrix scaling_matrix(const CVec& h_k, const CVec& h_1) {
  if (h_k.size() != h_1.size()) throw InvalidArgument("scaling_matrix: length mismatch");
  ScalingMatrix s;
  s.diag.resize(h_1.size());
  for (Eigen::Index l = 0; l < h_1.size(); ++l) {
    if (std::abs(h_1(l)) < 1e-12)
      throw DegenerateChannel("scaling_matrix: reference channel entry " + std::to_string(l) +
                              " is zero");
    s.diag(l) = std::conj(h_k(l)) / std::conj(h_1(l));
  }
  return s;
}

RVec uniform_grid(int G) {
  if (G < 1) throw InvalidArgument("uniform_grid: size must be >= 1");
  RVec g(G);
  for (int j = 0; j < G; ++j) g(j) = -1.0 + 2.0 * j / G;
  return g;
}

AngularDictionary build_dictionary(const SystemConfig& cfg) {
  AngularDictionary dict;
  dict.grid_r = uniform_grid(cfg.G_r);
  dict.grid_t = uniform_grid(cfg.G_t);
  dict.A_R = steering_matrix(cfg.L, dict.grid_r);
  dict.A_T = steering_matrix(cfg.M, dict.grid_t);
  return dict;
}

}  // namespace risce
