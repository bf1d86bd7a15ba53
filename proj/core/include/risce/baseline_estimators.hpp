#pragma once

#include <utility>
#include <vector>

#include "risce/channel_model.hpp"
#include "risce/training_protocol.hpp"
#include "risce/types.hpp"

namespace risce {

/// Per-estimator outcome for all users of one trial.
struct EstimateReport {
  std::vector<CMat> G_hat;                    // K matrices L x M
  double nmse = -1.0;                         // filled when ground truth is known
  std::vector<std::vector<int>> support_sets; // greedy methods only
  int iterations = 0;
  double wall_time = 0.0;  // seconds
  bool saturated = false;
};

/// Least-squares cascaded channel from de-spread observations:
/// G_hat = (Ytil V^+)^H with V^+ = V^H (V V^H)^{-1}. Requires B >= L.
CMat ls_estimate(const CMat& Ytil_k, const CMat& V);

/// Re-runs the training phase with one RIS element switched on per sub-frame
/// (V = I_L, so B = L) and reads the channel rows off directly.
EstimateReport binary_reflection_estimate(const ChannelRealization& chan, const SystemConfig& cfg,
                                          Rng& rng);

struct OmpResult {
  CMat X;                                   // G_r x G_c coefficients
  std::vector<std::pair<int, int>> support; // (row atom, column atom) in selection order
  std::vector<double> residual_trace;       // ||R||_F^2 after each selection, index 0 = start
  int iterations = 0;
};

/// Orthogonal matching pursuit on vec(Yh) = (conj(C) kron D) vec(X) without
/// forming the Kronecker dictionary. Yh is B x N, D is B x G_r, C is N x G_c.
/// Atoms are ranked by residual correlation divided by atom norm. Stops once
/// ||R||_F^2 <= eps.
OmpResult omp_recover(const CMat& Yh, const CMat& D, const CMat& C, double eps);

struct SompResult {
  CMat X;                            // G_r x N, row sparse
  std::vector<int> support;          // selection order
  std::vector<double> residual_trace;
  int iterations = 0;
  bool saturated = false;            // support reached B atoms
};

/// Simultaneous OMP on Yh = D X + noise (Yh is B x N, D is B x G_r). Row i
/// scores ||d_i^H R||^2 / ||d_i||^2.
SompResult somp_recover(const CMat& Yh, const CMat& D, double eps);

struct UserEstimate {
  CMat G_hat;
  std::vector<int> support;
  int iterations = 0;
  bool saturated = false;
};

/// SMV baseline: OMP over the full (cascaded AoA x BS AoD) grid.
UserEstimate smv_omp_estimate(const CMat& Ytil_k, const CMat& V, const AngularDictionary& dict,
                              double eps);

/// MMV baseline: SOMP over the cascaded AoA grid, G_hat = A_R X.
UserEstimate mmv_somp_estimate(const CMat& Ytil_k, const CMat& V, const CMat& A_R, double eps);

/// Genie-aided LS for user k: the true cascaded AoAs and BS AoDs are given,
/// only the N_f * N_h complex path gains are estimated.
CMat genie_ls_estimate(const ChannelRealization& chan, int k, const CMat& Ytil_k, const CMat& V);

/// Expected de-spread noise energy per user, M*B*noise_var/(P*T); with a
/// projected signal pass the subspace dimension as `dims`.
double noise_energy_threshold(int dims, int B, double noise_var, double P, int T);

}  // namespace risce
