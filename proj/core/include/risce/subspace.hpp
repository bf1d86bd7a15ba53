#pragma once

#include <vector>

#include "risce/types.hpp"

namespace risce {

struct SubspaceEstimate {
  CMat S_par;        // M x N_hat, orthonormal columns
  int N_hat = 0;
  RVec eigvals;      // length M, descending
  bool degenerate_gap = false;  // eigvals(N_hat-1) ~ eigvals(N_hat)
};

/// (1/BT) Y Y^H with Y the horizontal concatenation of the received blocks.
CMat sample_covariance(const std::vector<CMat>& Y_blocks);

/// Model order by minimum description length over n in {1, ..., M-1}:
///   -(M-n) B T log(geometric mean / arithmetic mean of the tail) + 2n(2M-n).
/// Tiny negative eigenvalues are clamped to zero; a tail containing a zero
/// eigenvalue makes that n infeasible.
int mdl_order(const RVec& eigvals, int M, int B, int T);

/// MDL score of one candidate order (+inf when infeasible). Exposed for tests.
double mdl_score(const RVec& eigvals, int n, int B, int T);

/// Leading N_hat eigenvectors of a Hermitian PSD covariance.
SubspaceEstimate estimate_subspace(const CMat& cov, int N_hat);

/// Full first step: covariance, eigendecomposition, MDL order (unless
/// `order_override` > 0) and basis extraction.
SubspaceEstimate estimate_subspace_from_blocks(const std::vector<CMat>& Y_blocks, int order_override = 0);

/// Projected observation Ybar_k = S_par^H Ytil_k (N_hat x B), i.e.
/// Ybar_k^H = Ytil_k^H (S_par^H)^+.
CMat project(const CMat& Ytil_k, const CMat& S_par);

}  // namespace risce
