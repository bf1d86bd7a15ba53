#include "risce/training_protocol.hpp"

#include <cmath>

#include "risce/reflection_design.hpp"

namespace risce {

CMat generate_pilots(int K, int T, double P) {
  if (K < 1 || T < K) throw InvalidArgument("generate_pilots: need 1 <= K <= T");
  if (!(P > 0.0)) throw InvalidArgument("generate_pilots: P must be positive");
  CMat S(K, T);
  const double amp = std::sqrt(P);
  for (int k = 0; k < K; ++k)
    for (int t = 0; t < T; ++t) S(k, t) = std::polar(amp, -2.0 * kPi * k * t / T);
  return S;
}

CMat random_reflections(int L, int B, Rng& rng) {
  if (L < 1 || B < 1) throw InvalidArgument("random_reflections: L and B must be >= 1");
  CMat V(L, B);
  for (int b = 0; b < B; ++b)
    for (int l = 0; l < L; ++l) V(l, b) = std::polar(1.0, uniform_angle(rng));
  return V;
}

CMat generate_reflections(int L, int B, ReflectionMode mode, Rng& rng, const CMat* A_R,
                          int n_sweeps) {
  CMat V = random_reflections(L, B, rng);
  if (mode == ReflectionMode::kRandom) return V;
  if (A_R == nullptr || A_R->rows() != L)
    throw InvalidArgument("generate_reflections: optimized mode needs an L-row dictionary");
  return optimize_reflections(*A_R, V, n_sweeps).V;
}

CVec despread(const CMat& Y_b, const CVec& s_k, double P, int T) {
  if (Y_b.cols() != s_k.size()) throw InvalidArgument("despread: pilot length mismatch");
  return Y_b * s_k / (P * T);
}

ReceivedBlocks simulate_uplink(const ChannelRealization& chan, const TrainingDesign& td, Rng& rng) {
  const int K = td.users();
  const int T = td.pilot_length();
  const int B = td.subframes();
  if (chan.users() != K) throw InvalidArgument("simulate_uplink: user count mismatch");
  const Eigen::Index L = chan.F.rows();
  const Eigen::Index M = chan.F.cols();
  if (td.V.rows() != L) throw InvalidArgument("simulate_uplink: reflection length mismatch");

  ReceivedBlocks rx;
  rx.Y.reserve(B);
  for (int b = 0; b < B; ++b) {
    CMat Yb = td.noise_var > 0.0 ? complex_gaussian_matrix(rng, M, T, td.noise_var)
                                 : CMat::Zero(M, T);
    for (int k = 0; k < K; ++k) Yb.noalias() += (chan.G[k].adjoint() * td.V.col(b)) * td.S.row(k);
    rx.Y.push_back(std::move(Yb));
  }
  rx.Ytil.assign(K, CMat(M, B));
  for (int k = 0; k < K; ++k) {
    const CVec s = td.pilot(k);
    for (int b = 0; b < B; ++b) rx.Ytil[k].col(b) = despread(rx.Y[b], s, td.P, T);
  }
  return rx;
}

}  // namespace risce
