#include "risce/subspace.hpp"

#include <cmath>
#include <limits>

namespace risce {

CMat sample_covariance(const std::vector<CMat>& Y_blocks) {
  if (Y_blocks.empty()) throw InvalidArgument("sample_covariance: no blocks");
  const Eigen::Index M = Y_blocks.front().rows();
  CMat C = CMat::Zero(M, M);
  Eigen::Index snapshots = 0;
  for (const auto& Y : Y_blocks) {
    if (Y.rows() != M) throw InvalidArgument("sample_covariance: inconsistent block heights");
    C.selfadjointView<Eigen::Lower>().rankUpdate(Y);
    snapshots += Y.cols();
  }
  if (snapshots == 0) throw InvalidArgument("sample_covariance: empty blocks");
  C = C.selfadjointView<Eigen::Lower>();
  return C / static_cast<double>(snapshots);
}

double mdl_score(const RVec& eigvals, int n, int B, int T) {
  const Eigen::Index M = eigvals.size();
  const Eigen::Index tail = M - n;
  if (n < 1 || tail < 1) return std::numeric_limits<double>::infinity();
  double log_geo = 0.0;
  double arith = 0.0;
  for (Eigen::Index i = n; i < M; ++i) {
    const double th = std::max(eigvals(i), 0.0);
    if (th <= 0.0) return std::numeric_limits<double>::infinity();
    log_geo += std::log(th);
    arith += th;
  }
  log_geo /= static_cast<double>(tail);
  arith /= static_cast<double>(tail);
  const double data = -static_cast<double>(tail) * B * T * (log_geo - std::log(arith));
  return data + 2.0 * n * (2.0 * M - n);
}

int mdl_order(const RVec& eigvals, int M, int B, int T) {
  if (eigvals.size() != M) throw InvalidArgument("mdl_order: need M eigenvalues");
  if (M < 2) return 1;
  int best_n = 1;
  double best = std::numeric_limits<double>::infinity();
  for (int n = 1; n < M; ++n) {
    const double s = mdl_score(eigvals, n, B, T);
    if (s < best) {
      best = s;
      best_n = n;
    }
  }
  return best_n;
}

SubspaceEstimate estimate_subspace(const CMat& cov, int N_hat) {
  if (cov.rows() != cov.cols()) throw InvalidArgument("estimate_subspace: covariance must be square");
  const Eigen::Index M = cov.rows();
  if (N_hat < 1 || N_hat > M) throw InvalidArgument("estimate_subspace: order out of range");
  Eigen::SelfAdjointEigenSolver<CMat> eig(cov);
  if (eig.info() != Eigen::Success) throw std::runtime_error("estimate_subspace: eigensolver failed");

  SubspaceEstimate est;
  est.eigvals = eig.eigenvalues().reverse();
  est.N_hat = N_hat;
  est.S_par = eig.eigenvectors().rowwise().reverse().leftCols(N_hat);
  if (N_hat < M) {
    const double gap = est.eigvals(N_hat - 1) - est.eigvals(N_hat);
    est.degenerate_gap = gap < 1e-12 * std::abs(est.eigvals(0));
  }
  return est;
}

SubspaceEstimate estimate_subspace_from_blocks(const std::vector<CMat>& Y_blocks, int order_override) {
  const CMat C = sample_covariance(Y_blocks);
  const int M = static_cast<int>(C.rows());
  if (order_override > 0) return estimate_subspace(C, std::min(order_override, M));
  Eigen::SelfAdjointEigenSolver<CMat> eig(C, Eigen::EigenvaluesOnly);
  const RVec theta = eig.eigenvalues().reverse();
  const int B = static_cast<int>(Y_blocks.size());
  const int T = static_cast<int>(Y_blocks.front().cols());
  return estimate_subspace(C, mdl_order(theta, M, B, T));
}

CMat project(const CMat& Ytil_k, const CMat& S_par) {
  if (Ytil_k.rows() != S_par.rows()) throw InvalidArgument("project: dimension mismatch");
  return S_par.adjoint() * Ytil_k;
}

}  // namespace risce
