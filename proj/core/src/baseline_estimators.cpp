#include "risce/baseline_estimators.hpp"

#include <algorithm>
#include <string>

#include "risce/detail/incremental_qr.hpp"

namespace risce {

namespace {

// 1/||col||^2, or 0 for a zero column.
RVec inverse_norms(const CMat& A) {
  RVec out = A.colwise().squaredNorm().transpose();
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = out(i) > 0.0 ? 1.0 / out(i) : 0.0;
  return out;
}

}  // namespace

double noise_energy_threshold(int dims, int B, double noise_var, double P, int T) {
  return static_cast<double>(dims) * B * noise_var / (P * T);
}

CMat ls_estimate(const CMat& Ytil_k, const CMat& V) {
  const Eigen::Index L = V.rows();
  const Eigen::Index B = V.cols();
  if (Ytil_k.cols() != B) throw InvalidArgument("ls_estimate: Ytil must have B columns");
  if (B < L)
    throw RankDeficient("ls_estimate: B = " + std::to_string(B) + " < L = " + std::to_string(L));
  Eigen::LLT<CMat> llt(V * V.adjoint());
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-12)
    throw RankDeficient("ls_estimate: V V^H is singular");
  return llt.solve(V * Ytil_k.adjoint());
}

EstimateReport binary_reflection_estimate(const ChannelRealization& chan, const SystemConfig& cfg,
                                          Rng& rng) {
  TrainingDesign td;
  td.S = generate_pilots(cfg.K, cfg.T, cfg.P);
  td.V = CMat::Identity(cfg.L, cfg.L);
  td.P = cfg.P;
  td.noise_var = cfg.noise_var;
  const ReceivedBlocks rx = simulate_uplink(chan, td, rng);

  EstimateReport rep;
  rep.G_hat.reserve(cfg.K);
  for (const auto& Yt : rx.Ytil) rep.G_hat.push_back(Yt.adjoint());
  return rep;
}

OmpResult omp_recover(const CMat& Yh, const CMat& D, const CMat& C, double eps) {
  const Eigen::Index B = Yh.rows();
  const Eigen::Index N = Yh.cols();
  if (D.rows() != B || C.rows() != N) throw InvalidArgument("omp_recover: shape mismatch");
  const Eigen::Index Gr = D.cols();
  const Eigen::Index Gc = C.cols();
  const Eigen::Index max_atoms = std::min(B * N, Gr * Gc);

  OmpResult res;
  res.X = CMat::Zero(Gr, Gc);
  detail::IncrementalQr qr(B * N, max_atoms);
  const CVec y = Eigen::Map<const CVec>(Yh.data(), B * N);
  CVec r = y;
  res.residual_trace.push_back(r.squaredNorm());

  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> used =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(Gr, Gc, false);
  const double floor = 1e-28 * std::max(1.0, y.squaredNorm());
  // Atom (i, j) has norm ||d_i|| ||c_j||; zero atoms are never selected.
  const RVec inv_d = inverse_norms(D);
  const RVec inv_c = inverse_norms(C);

  while (r.squaredNorm() > eps && qr.size() < max_atoms) {
    const Eigen::Map<const CMat> R(r.data(), B, N);
    const CMat Z = D.adjoint() * R * C;
    double best = -1.0;
    Eigen::Index bi = -1, bj = -1;
    for (Eigen::Index j = 0; j < Gc; ++j)
      for (Eigen::Index i = 0; i < Gr; ++i) {
        const double sc = std::norm(Z(i, j)) * inv_d(i) * inv_c(j);
        if (!used(i, j) && sc > best) {
          best = sc;
          bi = i;
          bj = j;
        }
      }
    if (bi < 0 || best <= floor) break;
    used(bi, bj) = true;
    const CMat atom = D.col(bi) * C.col(bj).adjoint();
    if (!qr.append(Eigen::Map<const CVec>(atom.data(), B * N))) continue;
    const auto q = qr.basis().col(qr.size() - 1);
    r -= q * q.dot(r);
    res.support.emplace_back(static_cast<int>(bi), static_cast<int>(bj));
    res.residual_trace.push_back(r.squaredNorm());
    ++res.iterations;
  }

  if (qr.size() > 0) {
    const CMat coef = qr.solve(y);
    for (Eigen::Index a = 0; a < qr.size(); ++a)
      res.X(res.support[a].first, res.support[a].second) = coef(a, 0);
  }
  return res;
}

SompResult somp_recover(const CMat& Yh, const CMat& D, double eps) {
  const Eigen::Index B = Yh.rows();
  if (D.rows() != B) throw InvalidArgument("somp_recover: shape mismatch");
  const Eigen::Index Gr = D.cols();
  const Eigen::Index max_atoms = std::min(B, Gr);

  SompResult res;
  res.X = CMat::Zero(Gr, Yh.cols());
  detail::IncrementalQr qr(B, max_atoms);
  CMat R = Yh;
  res.residual_trace.push_back(R.squaredNorm());
  std::vector<bool> used(Gr, false);
  const double floor = 1e-28 * std::max(1.0, Yh.squaredNorm());
  const RVec inv_d = inverse_norms(D);

  while (R.squaredNorm() > eps) {
    if (qr.size() == max_atoms) {
      res.saturated = true;
      break;
    }
    const RVec score = (D.adjoint() * R).rowwise().squaredNorm().cwiseProduct(inv_d);
    double best = -1.0;
    Eigen::Index bi = -1;
    for (Eigen::Index i = 0; i < Gr; ++i)
      if (!used[i] && score(i) > best) {
        best = score(i);
        bi = i;
      }
    if (bi < 0 || best <= floor) break;
    used[bi] = true;
    if (!qr.append(D.col(bi))) continue;
    const auto q = qr.basis().col(qr.size() - 1);
    R -= q * (q.adjoint() * R);
    res.support.push_back(static_cast<int>(bi));
    res.residual_trace.push_back(R.squaredNorm());
    ++res.iterations;
  }

  if (qr.size() > 0) {
    const CMat rows = qr.solve(Yh);
    for (Eigen::Index a = 0; a < qr.size(); ++a) res.X.row(res.support[a]) = rows.row(a);
  }
  return res;
}

UserEstimate smv_omp_estimate(const CMat& Ytil_k, const CMat& V, const AngularDictionary& dict,
                              double eps) {
  const CMat D = V.adjoint() * dict.A_R;
  const OmpResult omp = omp_recover(Ytil_k.adjoint(), D, dict.A_T, eps);
  UserEstimate out;
  out.G_hat = dict.A_R * omp.X * dict.A_T.adjoint();
  out.iterations = omp.iterations;
  for (const auto& [i, j] : omp.support) out.support.push_back(i * static_cast<int>(dict.A_T.cols()) + j);
  return out;
}

UserEstimate mmv_somp_estimate(const CMat& Ytil_k, const CMat& V, const CMat& A_R, double eps) {
  const CMat D = V.adjoint() * A_R;
  SompResult somp = somp_recover(Ytil_k.adjoint(), D, eps);
  UserEstimate out;
  out.G_hat = A_R * somp.X;
  out.iterations = somp.iterations;
  out.saturated = somp.saturated;
  out.support = std::move(somp.support);
  return out;
}

CMat genie_ls_estimate(const ChannelRealization& chan, int k, const CMat& Ytil_k, const CMat& V) {
  const Eigen::Index L = V.rows();
  const Eigen::Index B = V.cols();
  const Eigen::Index M = Ytil_k.rows();
  const int n_f = static_cast<int>(chan.bs_ris_paths.size());
  const int n_h = static_cast<int>(chan.ris_user_paths.at(k).size());
  const Eigen::Index unknowns = static_cast<Eigen::Index>(n_f) * n_h;
  if (unknowns > B * M)
    throw RankDeficient("genie_ls_estimate: more unknown gains than measurements");

  std::vector<CMat> atoms;
  atoms.reserve(unknowns);
  detail::IncrementalQr qr(B * M, unknowns);
  for (int p = 0; p < n_f; ++p) {
    const CVec a_t = steering_vector(static_cast<int>(M), spatial_frequency(chan.bs_ris_paths[p].aod));
    for (int q = 0; q < n_h; ++q) {
      const CVec a_r = steering_vector(static_cast<int>(L), cascaded_frequency(chan, k, p, q));
      atoms.push_back(a_r * a_t.adjoint());
      const CMat measured = V.adjoint() * atoms.back();
      if (!qr.append(Eigen::Map<const CVec>(measured.data(), B * M)))
        throw RankDeficient("genie_ls_estimate: collinear path atoms");
    }
  }
  const CMat Yh = Ytil_k.adjoint();
  const CMat coef = qr.solve(Eigen::Map<const CVec>(Yh.data(), B * M));
  CMat G = CMat::Zero(L, M);
  for (Eigen::Index a = 0; a < unknowns; ++a) G += coef(a, 0) * atoms[a];
  return G;
}

}  // namespace risce
