#pragma once

#include <utility>
#include <vector>

#include "risce/random.hpp"
#include "risce/types.hpp"

namespace risce {

struct CoherenceReport {
  double mu = 0.0;
  std::pair<int, int> worst_pair{0, 0};
  /// Sum of squared normalised off-diagonal Gram magnitudes.
  double gram_offdiag_energy = 0.0;
};

/// Largest normalised inner-product magnitude between two distinct columns.
CoherenceReport mutual_coherence(const CMat& D);

struct ReflectionDesignResult {
  CMat V;  // L x B, unit modulus
  /// Surrogate ||B*Xi - Q Q^H||_F^2, sampled before each column update, after
  /// its rank-one eigen-update, and after the unit-modulus projection.
  std::vector<double> before_update;
  std::vector<double> after_rank_one;
  std::vector<double> after_projection;
  int skipped_updates = 0;
};

/// v = exp(i * angle(U_R q)) entrywise; a zero entry gets phase 0.
CVec projection_unit_modulus(const CVec& q_tilde, const CMat& U_R);

/// Sequential column-by-column refinement of the reflection matrix so that
/// A_R^H V V^H A_R approaches B*I under the unit-modulus constraint.
/// `V_init` fixes the starting point, which makes the result deterministic.
ReflectionDesignResult optimize_reflections(const CMat& A_R, const CMat& V_init, int n_sweeps = 3);

/// Same, starting from a random unit-modulus matrix drawn from `rng`.
ReflectionDesignResult optimize_reflections(const CMat& A_R, int B, int n_sweeps, Rng& rng);

}  // namespace risce
