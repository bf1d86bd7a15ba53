#pragma once

#include <ostream>
#include <stdexcept>
#include <vector>

#include "risce/types.hpp"

namespace risce {

/// Multi-user joint recovery of the common row-sparse matrix Xbar and the
/// per-user scaling diagonals alpha_k from projected observations
///   Ybar_k^H = V^H diag(alpha_k) A_R Xbar + noise.
///
/// The log-sum objective
///   L(Xbar, alpha) = sum_i log(||xbar_i||^2 + varsigma)
///                  + lambda * sum_k ||Ybar_k^H - V^H diag(alpha_k) A_R Xbar||_F^2
/// is minimised by alternating a closed-form least-squares alpha update with
/// an iteratively reweighted (majorise-minimise) Xbar update. Both steps are
/// descent steps, so the outer objective is non-increasing.
///
/// User 0 is the reference: alpha_0 is pinned to the all-ones diagonal.

struct MjceOptions {
  double lambda = 1.0;
  double varsigma = 1e-9;
  double inner_tol = 1e-6;
  double outer_tol = 1e-5;
  int max_inner = 30;
  int max_outer = 50;
  /// Per-iteration objective values are written here when non-null.
  std::ostream* trace = nullptr;
};

struct MjceResult {
  CMat Xbar;                                        // G_r x N_hat
  std::vector<CVec> alphas;                         // K diagonals, alphas[0] == 1
  std::vector<double> objective_trace;              // L after init and each outer step
  std::vector<std::vector<double>> surrogate_traces;  // one per outer step
  std::vector<CMat> G_hat;                          // filled when S_par is supplied
  int outer_iterations = 0;
  int inner_iterations = 0;
  int alpha_fallbacks = 0;  // ridge solves caused by a rank-deficient alpha system
  int alpha_holds = 0;  // outer steps that kept alpha because B * rank(Xbar) <= L
  bool alpha_rank_condition = true;  // rank(Xbar) >= L/B at the first alpha update
};

/// Thrown when the outer objective increases, which the descent argument rules
/// out; carries the trace for diagnosis.
class MjceDivergence : public std::runtime_error {
 public:
  MjceDivergence(const std::string& what, std::vector<double> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const { return trace_; }

 private:
  std::vector<double> trace_;
};

/// lambda = P T d / (noise_var ln G_r).
double penalty_lambda(double P, int T, double d, double noise_var, int G_r);

/// Log-sum plus weighted fitting residual. `Ybar_all[k]` is N_hat x B.
double objective(const CMat& Xbar, const std::vector<CVec>& alphas, const std::vector<CMat>& Ybar_all,
                 const CMat& V, const CMat& A_R, double lambda, double varsigma);

/// Reweighting diagonal 1/(||xbar_i||^2 + varsigma).
RVec reweight_diagonal(const CMat& Xbar, double varsigma);

struct AlphaUpdate {
  CVec alpha;
  bool fallback = false;
};

/// Least-squares scaling diagonal for one user with Xbar fixed. The normal
/// matrix is (V V^H) .* (conj(W) W^T) with W = A_R Xbar, i.e. the Gram of the
/// L diagonal-selected Kronecker columns, formed without the Kronecker product.
/// If that matrix is numerically singular a ridge of 1e-10 * trace is added,
/// pulled towards `anchor` when given (so the fit never gets worse than it).
AlphaUpdate update_alpha(const CMat& Xbar, const CMat& Ybar_k, const CMat& V, const CMat& A_R,
                         const CVec* anchor = nullptr);

struct XbarUpdate {
  CMat Xbar;
  /// Entry 0 is L at the starting point; entry t is the majoriser value
  /// L^ub(Xbar(t); Xbar(t-1)) reached by the t-th reweighted solve.
  std::vector<double> surrogate_trace;
  int iterations = 0;
};

/// Iteratively reweighted minimisation over Xbar with the alphas fixed.
XbarUpdate update_xbar(const std::vector<CVec>& alphas, const std::vector<CMat>& Ybar_all,
                       const CMat& V, const CMat& A_R, double lambda, double varsigma,
                       const CMat& Xbar_init, int max_inner, double tol);

/// alpha_k(l) = mean over m of Ghat_k(l, m) / Ghat_0(l, m), skipping entries
/// with |Ghat_0(l, m)| < 1e-12 (all skipped -> 1).
std::vector<CVec> init_alpha(const std::vector<CMat>& Ghat_init);

/// Full alternating solver. `alpha0` seeds the scaling diagonals (entry 0 is
/// ignored); pass an empty vector to start from all ones. When `S_par` is
/// non-empty the channel estimates diag(alpha_k) A_R Xbar S_par^H are formed.
MjceResult run_mjce(const std::vector<CMat>& Ybar_all, const CMat& V, const CMat& A_R,
                    const CMat& S_par, std::vector<CVec> alpha0, const MjceOptions& opts);

}  // namespace risce
