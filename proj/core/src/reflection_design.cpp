#include "risce/reflection_design.hpp"

#include <cmath>

#include "risce/training_protocol.hpp"

namespace risce {

CoherenceReport mutual_coherence(const CMat& D) {
  if (D.cols() < 2) throw InvalidArgument("mutual_coherence: need at least two columns");
  const RVec norms = D.colwise().norm().transpose();
  for (Eigen::Index i = 0; i < norms.size(); ++i)
    if (norms(i) == 0.0) throw InvalidArgument("mutual_coherence: zero column");

  const CMat gram = D.adjoint() * D;
  CoherenceReport rep;
  for (Eigen::Index j = 0; j < gram.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      const double c = std::abs(gram(i, j)) / (norms(i) * norms(j));
      rep.gram_offdiag_energy += 2.0 * c * c;
      if (c > rep.mu) {
        rep.mu = c;
        rep.worst_pair = {static_cast<int>(i), static_cast<int>(j)};
      }
    }
  }
  return rep;
}

CVec projection_unit_modulus(const CVec& q_tilde, const CMat& U_R) {
  const CVec z = U_R * q_tilde;
  CVec v(z.size());
  for (Eigen::Index l = 0; l < z.size(); ++l)
    v(l) = z(l) == cd(0.0) ? cd(1.0) : std::polar(1.0, std::arg(z(l)));
  return v;
}

namespace {

double surrogate(const CMat& target, const CMat& Q) {
  return (target - Q * Q.adjoint()).squaredNorm();
}

}  // namespace

ReflectionDesignResult optimize_reflections(const CMat& A_R, const CMat& V_init, int n_sweeps) {
  const Eigen::Index L = A_R.rows();
  const Eigen::Index B = V_init.cols();
  if (V_init.rows() != L) throw InvalidArgument("optimize_reflections: V rows must equal L");
  if (B < 1) throw InvalidArgument("optimize_reflections: B must be >= 1");
  if (A_R.squaredNorm() == 0.0) throw InvalidArgument("optimize_reflections: zero dictionary");

  Eigen::SelfAdjointEigenSolver<CMat> eig_r(A_R * A_R.adjoint());
  // Descending order.
  const RVec gamma = eig_r.eigenvalues().reverse();
  const CMat U = eig_r.eigenvectors().rowwise().reverse();
  const double gamma_tol = 1e-10 * gamma(0);

  const CMat target = static_cast<double>(B) * gamma.cast<cd>().asDiagonal().toDenseMatrix();
  ReflectionDesignResult res;
  res.V = V_init;
  CMat Q = gamma.cast<cd>().asDiagonal() * (U.adjoint() * res.V);

  for (int sweep = 0; sweep < n_sweeps; ++sweep) {
    for (Eigen::Index b = 0; b < B; ++b) {
      const CVec q_old = Q.col(b);
      const CMat E = target - Q * Q.adjoint() + q_old * q_old.adjoint();
      res.before_update.push_back(surrogate(target, Q));

      Eigen::SelfAdjointEigenSolver<CMat> eig_e(E);
      const RVec& xi = eig_e.eigenvalues();
      const Eigen::Index top = xi.size() - 1;
      if (!(xi(top) > 0.0)) {
        ++res.skipped_updates;
        res.after_rank_one.push_back(res.before_update.back());
        res.after_projection.push_back(res.before_update.back());
        continue;
      }
      // When the leading eigenvalue is repeated, pick the unit vector of that
      // eigenspace closest to the current column.
      Eigen::Index first = top;
      const double tie = 1e-9 * std::abs(xi(top));
      while (first > 0 && xi(top) - xi(first - 1) <= tie) --first;
      const CMat basis = eig_e.eigenvectors().middleCols(first, top - first + 1);
      CVec u = basis * (basis.adjoint() * q_old);
      if (u.norm() <= 1e-12 * std::max(1.0, q_old.norm())) u = eig_e.eigenvectors().col(top);
      u.normalize();
      const CVec q_new = std::sqrt(xi(top)) * u;
      Q.col(b) = q_new;
      res.after_rank_one.push_back(surrogate(target, Q));

      // Undo the Xi scaling only on well-conditioned components.
      CVec q_tilde = U.adjoint() * res.V.col(b);
      for (Eigen::Index l = 0; l < L; ++l)
        if (gamma(l) > gamma_tol) q_tilde(l) = q_new(l) / gamma(l);
      res.V.col(b) = projection_unit_modulus(q_tilde, U);
      Q.col(b) = gamma.cast<cd>().asDiagonal() * (U.adjoint() * res.V.col(b));
      res.after_projection.push_back(surrogate(target, Q));
    }
  }
  return res;
}

ReflectionDesignResult optimize_reflections(const CMat& A_R, int B, int n_sweeps, Rng& rng) {
  return optimize_reflections(A_R, random_reflections(static_cast<int>(A_R.rows()), B, rng),
                              n_sweeps);
}

}  // namespace risce
