#include "risce/mjce.hpp"

#include <cmath>
#include <string>

namespace risce {

namespace {

// Sensing operator of user k: V^H diag(alpha_k) A_R  (B x G_r).
CMat sensing(const CVec& alpha, const CMat& V, const CMat& A_R) {
  return V.adjoint() * (alpha.asDiagonal() * A_R);
}

void check_shapes(const std::vector<CVec>& alphas, const std::vector<CMat>& Ybar_all, const CMat& V,
                  const CMat& A_R) {
  if (alphas.size() != Ybar_all.size() || Ybar_all.empty())
    throw InvalidArgument("mjce: need one alpha per user and at least one user");
  if (A_R.rows() != V.rows()) throw InvalidArgument("mjce: A_R and V disagree on L");
  for (const auto& Y : Ybar_all)
    if (Y.cols() != V.cols()) throw InvalidArgument("mjce: Ybar_k must have B columns");
  for (const auto& a : alphas)
    if (a.size() != V.rows()) throw InvalidArgument("mjce: alpha_k must have length L");
}

double fit_energy(const CMat& Xbar, const std::vector<CVec>& alphas, const std::vector<CMat>& Ybar_all,
                  const CMat& V, const CMat& A_R) {
  double fit = 0.0;
  const CMat W = A_R * Xbar;
  for (std::size_t k = 0; k < Ybar_all.size(); ++k)
    fit += (Ybar_all[k].adjoint() - V.adjoint() * (alphas[k].asDiagonal() * W)).squaredNorm();
  return fit;
}

}  // namespace

double penalty_lambda(double P, int T, double d, double noise_var, int G_r) {
  if (G_r <= 1) throw InvalidArgument("penalty_lambda: G_r must exceed 1");
  if (!(P > 0.0) || T < 1 || !(d > 0.0) || !(noise_var > 0.0))
    throw InvalidArgument("penalty_lambda: arguments must be positive");
  return P * T * d / (noise_var * std::log(static_cast<double>(G_r)));
}

RVec reweight_diagonal(const CMat& Xbar, double varsigma) {
  return (Xbar.rowwise().squaredNorm().array() + varsigma).inverse().matrix();
}

double objective(const CMat& Xbar, const std::vector<CVec>& alphas, const std::vector<CMat>& Ybar_all,
                 const CMat& V, const CMat& A_R, double lambda, double varsigma) {
  check_shapes(alphas, Ybar_all, V, A_R);
  const double logsum = (Xbar.rowwise().squaredNorm().array() + varsigma).log().sum();
  return logsum + lambda * fit_energy(Xbar, alphas, Ybar_all, V, A_R);
}

AlphaUpdate update_alpha(const CMat& Xbar, const CMat& Ybar_k, const CMat& V, const CMat& A_R,
                         const CVec* anchor) {
  const Eigen::Index L = V.rows();
  if (A_R.rows() != L || A_R.cols() != Xbar.rows() || Ybar_k.rows() != Xbar.cols() ||
      Ybar_k.cols() != V.cols())
    throw InvalidArgument("update_alpha: shape mismatch");

  const CMat W = A_R * Xbar;  // L x N
  // Column l of the restricted Kronecker matrix is vec(V^H e_l W(l,:)).
  const CMat gram = (V * V.adjoint()).cwiseProduct(W.conjugate() * W.transpose());
  const CVec rhs = (V * Ybar_k.adjoint()).cwiseProduct(W.conjugate()).rowwise().sum();

  AlphaUpdate out;
  Eigen::LLT<CMat> llt(gram);
  if (llt.info() == Eigen::Success && llt.rcond() > 1e-12) {
    out.alpha = llt.solve(rhs);
    return out;
  }
  out.fallback = true;
  double ridge = 1e-10 * gram.trace().real();
  if (!(ridge > 0.0)) ridge = 1e-10;
  CMat reg = gram;
  reg.diagonal().array() += ridge;
  CVec b = rhs;
  if (anchor != nullptr) b += ridge * (*anchor);
  out.alpha = reg.ldlt().solve(b);
  return out;
}

XbarUpdate update_xbar(const std::vector<CVec>& alphas, const std::vector<CMat>& Ybar_all,
                       const CMat& V, const CMat& A_R, double lambda, double varsigma,
                       const CMat& Xbar_init, int max_inner, double tol) {
  check_shapes(alphas, Ybar_all, V, A_R);
  if (!(lambda > 0.0)) throw InvalidArgument("update_xbar: lambda must be positive");
  const Eigen::Index K = static_cast<Eigen::Index>(Ybar_all.size());
  const Eigen::Index B = V.cols();
  const Eigen::Index Gr = A_R.cols();
  const Eigen::Index N = Ybar_all.front().rows();
  if (Xbar_init.rows() != Gr || Xbar_init.cols() != N)
    throw InvalidArgument("update_xbar: Xbar has the wrong shape");

  // Stacked operator Phi (KB x G_r) and data (KB x N).
  CMat Phi(K * B, Gr);
  CMat Y(K * B, N);
  for (Eigen::Index k = 0; k < K; ++k) {
    Phi.middleRows(k * B, B) = sensing(alphas[k], V, A_R);
    Y.middleRows(k * B, B) = Ybar_all[k].adjoint();
  }
  XbarUpdate out;
  out.Xbar = Xbar_init;
  const double logsum0 = (out.Xbar.rowwise().squaredNorm().array() + varsigma).log().sum();
  out.surrogate_trace.push_back(logsum0 + lambda * (Y - Phi * out.Xbar).squaredNorm());

  // With x = diag(sqrt(w)) u the reweighted problem is the ridge regression
  // min ||[sqrt(lambda) Phi diag(sqrt(w)); I] u - [sqrt(lambda) Y; 0]||. A
  // Householder QR of the stacked matrix stays accurate when lambda * w spans
  // many decades, where the normal equations lose the descent property.
  const double sl = std::sqrt(lambda);
  CMat A(K * B + Gr, Gr);
  A.bottomRows(Gr).setIdentity();
  CMat rhs = CMat::Zero(K * B + Gr, N);
  rhs.topRows(K * B) = sl * Y;

  for (int t = 0; t < max_inner; ++t) {
    const RVec w = out.Xbar.rowwise().squaredNorm().array() + varsigma;  // 1 / Lambda
    const RVec sw = w.array().sqrt();
    A.topRows(K * B) = sl * Phi * sw.cast<cd>().asDiagonal();
    Eigen::HouseholderQR<CMat> qr(A);
    CMat next = sw.cast<cd>().asDiagonal() * qr.solve(rhs);
    const double majoriser =
        ((next.rowwise().squaredNorm().array() + varsigma) / w.array() + w.array().log() - 1.0).sum() +
        lambda * (Y - Phi * next).squaredNorm();
    out.Xbar = std::move(next);
    ++out.iterations;
    const double prev = out.surrogate_trace.back();
    out.surrogate_trace.push_back(majoriser);
    if (prev - majoriser < tol * std::abs(prev)) break;
  }
  return out;
}

std::vector<CVec> init_alpha(const std::vector<CMat>& Ghat_init) {
  if (Ghat_init.empty()) throw InvalidArgument("init_alpha: no estimates");
  const CMat& G1 = Ghat_init.front();
  if (G1.cwiseAbs().maxCoeff() < 1e-12)
    throw DegenerateChannel("init_alpha: reference estimate is identically zero");
  const Eigen::Index L = G1.rows();
  const Eigen::Index M = G1.cols();

  std::vector<CVec> alphas;
  alphas.reserve(Ghat_init.size());
  alphas.push_back(CVec::Ones(L));
  for (std::size_t k = 1; k < Ghat_init.size(); ++k) {
    const CMat& Gk = Ghat_init[k];
    if (Gk.rows() != L || Gk.cols() != M) throw InvalidArgument("init_alpha: shape mismatch");
    CVec a(L);
    for (Eigen::Index l = 0; l < L; ++l) {
      cd sum = 0.0;
      int used = 0;
      for (Eigen::Index m = 0; m < M; ++m) {
        if (std::abs(G1(l, m)) < 1e-12) continue;
        sum += Gk(l, m) / G1(l, m);
        ++used;
      }
      a(l) = used > 0 ? sum / static_cast<double>(used) : cd(1.0);
    }
    alphas.push_back(std::move(a));
  }
  return alphas;
}

MjceResult run_mjce(const std::vector<CMat>& Ybar_all, const CMat& V, const CMat& A_R,
                    const CMat& S_par, std::vector<CVec> alpha0, const MjceOptions& opts) {
  const std::size_t K = Ybar_all.size();
  const Eigen::Index L = V.rows();
  if (K == 0) throw InvalidArgument("run_mjce: no users");
  if (alpha0.empty()) alpha0.assign(K, CVec::Ones(L));
  if (alpha0.size() != K) throw InvalidArgument("run_mjce: alpha0 must have one entry per user");
  alpha0[0] = CVec::Ones(L);

  MjceResult res;
  res.alphas = std::move(alpha0);
  res.Xbar = CMat::Ones(A_R.cols(), Ybar_all.front().rows());
  check_shapes(res.alphas, Ybar_all, V, A_R);

  auto eval = [&] {
    return objective(res.Xbar, res.alphas, Ybar_all, V, A_R, opts.lambda, opts.varsigma);
  };
  res.objective_trace.push_back(eval());
  if (opts.trace) *opts.trace << "mjce outer 0 objective " << res.objective_trace.back() << '\n';

  for (int r = 1; r <= opts.max_outer; ++r) {
    XbarUpdate xu = update_xbar(res.alphas, Ybar_all, V, A_R, opts.lambda, opts.varsigma, res.Xbar,
                                opts.max_inner, opts.inner_tol);
    res.Xbar = std::move(xu.Xbar);
    res.inner_iterations += xu.iterations;
    res.surrogate_traces.push_back(std::move(xu.surrogate_trace));

    // The alpha system has B * rank(Xbar) equations for L unknowns; without
    // redundancy it reproduces the noise exactly, so alpha is held instead.
    Eigen::ColPivHouseholderQR<CMat> qr(res.Xbar);
    qr.setThreshold(1e-10);
    const double equations = static_cast<double>(qr.rank()) * static_cast<double>(V.cols());
    if (r == 1) res.alpha_rank_condition = equations >= static_cast<double>(L);
    if (equations > static_cast<double>(L)) {
      for (std::size_t k = 1; k < K; ++k) {
        AlphaUpdate au = update_alpha(res.Xbar, Ybar_all[k], V, A_R, &res.alphas[k]);
        res.alpha_fallbacks += au.fallback ? 1 : 0;
        res.alphas[k] = std::move(au.alpha);
      }
    } else {
      ++res.alpha_holds;
    }

    const double prev = res.objective_trace.back();
    const double cur = eval();
    res.outer_iterations = r;
    if (opts.trace)
      *opts.trace << "mjce outer " << r << " objective " << cur << " inner " << xu.iterations << '\n';
    if (cur > prev + 1e-8 * std::abs(prev)) {
      res.objective_trace.push_back(cur);
      throw MjceDivergence("run_mjce: objective increased at outer iteration " + std::to_string(r),
                           res.objective_trace);
    }
    res.objective_trace.push_back(cur);
    if (prev - cur < opts.outer_tol * std::abs(prev)) break;
  }

  if (S_par.size() > 0) {
    const CMat common = A_R * res.Xbar * S_par.adjoint();
    res.G_hat.reserve(K);
    for (const auto& a : res.alphas) res.G_hat.push_back(a.asDiagonal() * common);
  }
  return res;
}

}  // namespace risce
