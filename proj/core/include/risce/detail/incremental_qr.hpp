#pragma once

#include "risce/types.hpp"

namespace risce::detail {

// Thin QR factorisation grown one column at a time (classical Gram-Schmidt
// with one re-orthogonalisation pass). Used by the greedy pursuits.
class IncrementalQr {
 public:
  explicit IncrementalQr(Eigen::Index rows, Eigen::Index max_cols)
      : q_(rows, max_cols), r_(CMat::Zero(max_cols, max_cols)) {}

  Eigen::Index size() const { return size_; }
  Eigen::Index capacity() const { return q_.cols(); }
  auto basis() const { return q_.leftCols(size_); }

  // Returns false (and leaves the factorisation unchanged) if `a` is
  // numerically inside the current span.
  bool append(const CVec& a) {
    if (size_ == capacity()) return false;
    const double anorm = a.norm();
    if (anorm == 0.0) return false;
    CVec w = a;
    CVec coeff = CVec::Zero(size_);
    for (int pass = 0; pass < 2 && size_ > 0; ++pass) {
      const CVec c = basis().adjoint() * w;
      w.noalias() -= basis() * c;
      coeff += c;
    }
    const double wnorm = w.norm();
    if (wnorm <= 1e-10 * anorm) return false;
    q_.col(size_) = w / wnorm;
    r_.col(size_).head(size_) = coeff;
    r_(size_, size_) = wnorm;
    ++size_;
    return true;
  }

  // Least-squares coefficients for min ||A x - rhs|| over the appended columns.
  CMat solve(const CMat& rhs) const {
    const CMat qtb = basis().adjoint() * rhs;
    return r_.topLeftCorner(size_, size_).triangularView<Eigen::Upper>().solve(qtb);
  }

  // rhs minus its projection onto the span.
  CMat residual(const CMat& rhs) const { return rhs - basis() * (basis().adjoint() * rhs); }

 private:
  CMat q_;
  CMat r_;
  Eigen::Index size_ = 0;
};

}  // namespace risce::detail
