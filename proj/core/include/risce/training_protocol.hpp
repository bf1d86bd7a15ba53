#pragma once

#include <vector>

#include "risce/channel_model.hpp"
#include "risce/random.hpp"
#include "risce/types.hpp"

namespace risce {

enum class ReflectionMode { kRandom, kOptimized };

/// Pilots, reflection schedule and power budget for the training phase.
struct TrainingDesign {
  CMat S;  // K x T, row k holds s_k^H
  CMat V;  // L x B, column b is the reflection vector of sub-frame b
  double P = 1.0;
  double noise_var = 1.0;

  int users() const { return static_cast<int>(S.rows()); }
  int pilot_length() const { return static_cast<int>(S.cols()); }
  int subframes() const { return static_cast<int>(V.cols()); }
  /// s_k as a column vector.
  CVec pilot(int k) const { return S.row(k).adjoint(); }
};

struct ReceivedBlocks {
  std::vector<CMat> Y;     // B blocks, each M x T
  std::vector<CMat> Ytil;  // K de-spread observations, each M x B
};

/// First K rows of the T-point DFT matrix scaled by sqrt(P), so that
/// S S^H = P T I_K.
CMat generate_pilots(int K, int T, double P);

/// Unit-modulus reflections with phases uniform on [0, 2*pi).
CMat random_reflections(int L, int B, Rng& rng);

/// Random or coherence-optimised reflection matrix. The optimised mode starts
/// from a random draw and refines it against `A_R`.
CMat generate_reflections(int L, int B, ReflectionMode mode, Rng& rng, const CMat* A_R = nullptr,
                          int n_sweeps = 3);

/// (1/PT) Y_b s_k.
CVec despread(const CMat& Y_b, const CVec& s_k, double P, int T);

/// Y_b = sum_k G_k^H v_b s_k^H + U_b, followed by de-spreading.
ReceivedBlocks simulate_uplink(const ChannelRealization& chan, const TrainingDesign& td, Rng& rng);

}  // namespace risce
