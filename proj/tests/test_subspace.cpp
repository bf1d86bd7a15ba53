#include <doctest.h>

#include <cmath>

#include "risce/subspace.hpp"
#include "test_util.hpp"

using namespace risce;

namespace {

// Largest principal-angle sine between the column spans of two orthonormal bases.
double max_principal_sine(const CMat& A, const CMat& B) {
  const CMat P = A - B * (B.adjoint() * A);
  return std::sqrt(std::max(0.0, P.squaredNorm() > 0 ? Eigen::JacobiSVD<CMat>(P).singularValues()(0) *
                                                           Eigen::JacobiSVD<CMat>(P).singularValues()(0)
                                                     : 0.0));
}

CMat orthonormal(const CMat& A) {
  return Eigen::HouseholderQR<CMat>(A).householderQ() * CMat::Identity(A.rows(), A.cols());
}

// Snapshots with an N-dimensional planted subspace at the given per-element SNR.
std::vector<CMat> planted_blocks(Rng& rng, int M, int N, int B, int T, double snr) {
  const CMat A = orthonormal(complex_gaussian_matrix(rng, M, N));
  std::vector<CMat> blocks;
  for (int b = 0; b < B; ++b)
    blocks.push_back(std::sqrt(snr * M / N) * A * complex_gaussian_matrix(rng, N, T) +
                     complex_gaussian_matrix(rng, M, T));
  return blocks;
}

}  // namespace

TEST_CASE("sample covariance") {
  CHECK(sample_covariance({CMat::Zero(4, 3)}).norm() == 0.0);
  Rng rng = make_stream({1});
  const CMat y = complex_gaussian_matrix(rng, 5, 1);
  CHECK((sample_covariance({y}) - y * y.adjoint()).norm() < 1e-14);

  std::vector<CMat> blocks;
  for (int b = 0; b < 3; ++b) blocks.push_back(complex_gaussian_matrix(rng, 6, 4));
  const CMat C = sample_covariance(blocks);
  CHECK((C - C.adjoint()).norm() < 1e-12);
  CMat Y(6, 12);
  for (int b = 0; b < 3; ++b) Y.middleCols(4 * b, 4) = blocks[b];
  CHECK((C - Y * Y.adjoint() / 12.0).norm() < 1e-12);
  CHECK_THROWS_AS(sample_covariance({}), InvalidArgument);
}

TEST_CASE("MDL edge cases") {
  RVec ev = RVec::Constant(8, 0.1);
  ev(0) = 50.0;
  CHECK(mdl_order(ev, 8, 64, 8) == 1);

  // Equal eigenvalues: data term vanishes and the penalty picks the smallest n.
  CHECK(mdl_order(RVec::Constant(8, 2.0), 8, 16, 4) == 1);
  for (int n = 1; n < 8; ++n)
    CHECK(mdl_score(RVec::Constant(8, 2.0), n, 16, 4) == doctest::Approx(2.0 * n * (16 - n)));

  // A zero eigenvalue in the tail makes that order infeasible.
  RVec z = RVec::Constant(4, 1.0);
  z(3) = 0.0;
  CHECK(std::isinf(mdl_score(z, 1, 4, 4)));
  CHECK(std::isinf(mdl_score(z, 0, 4, 4)));
}

TEST_CASE("MDL score matches a direct product-form evaluation") {
  const RVec ev = (RVec(6) << 9.0, 4.0, 1.2, 1.1, 0.9, 0.8).finished();
  const int B = 3, T = 2;
  for (int n = 1; n < 6; ++n) {
    double prod = 1.0, sum = 0.0;
    const int tail = 6 - n;
    for (int i = n; i < 6; ++i) {
      prod *= ev(i);
      sum += ev(i);
    }
    const double ratio = std::pow(prod, 1.0 / tail) / (sum / tail);
    const double expect = -std::log(std::pow(ratio, tail * B * T)) + 2.0 * n * (12 - n);
    CHECK(mdl_score(ev, n, B, T) == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("MDL recovers a planted order of 3") {
  Rng rng = make_stream({2});
  int hits = 0;
  for (int t = 0; t < 200; ++t) {
    const auto blocks = planted_blocks(rng, 16, 3, 64, 8, 100.0);
    const SubspaceEstimate est = estimate_subspace_from_blocks(blocks);
    hits += est.N_hat == 3;
  }
  CHECK(hits >= 190);
}

TEST_CASE("subspace extraction") {
  const SubspaceEstimate full = estimate_subspace(CMat::Identity(5, 5), 5);
  CHECK((full.S_par.adjoint() * full.S_par - CMat::Identity(5, 5)).norm() < 1e-10);

  Rng rng = make_stream({3});
  const CVec u = complex_gaussian_matrix(rng, 6, 1);
  const SubspaceEstimate r1 = estimate_subspace(u * u.adjoint(), 1);
  CHECK((u - r1.S_par * (r1.S_par.adjoint() * u)).norm() < 1e-10 * u.norm());
  CHECK(!r1.degenerate_gap);

  const CMat A = complex_gaussian_matrix(rng, 8, 3);
  const SubspaceEstimate pl = estimate_subspace(A * A.adjoint() + 0.01 * CMat::Identity(8, 8), 3);
  CHECK(max_principal_sine(orthonormal(A), pl.S_par) < 1e-6);
  for (int i = 1; i < 8; ++i) CHECK(pl.eigvals(i) <= pl.eigvals(i - 1));

  const SubspaceEstimate tie = estimate_subspace(CMat::Identity(4, 4), 2);
  CHECK(tie.degenerate_gap);
  CHECK_THROWS_AS(estimate_subspace(CMat::Identity(4, 4), 0), InvalidArgument);
}

TEST_CASE("noiseless subspace contains the BS-side steering directions") {
  Rng rng = make_stream({4});
  const int M = 12, N = 3, B = 6, T = 4;
  const CMat A = complex_gaussian_matrix(rng, M, N);
  std::vector<CMat> blocks;
  for (int b = 0; b < B; ++b) blocks.push_back(A * complex_gaussian_matrix(rng, N, T));
  const SubspaceEstimate est = estimate_subspace_from_blocks(blocks, N);
  CHECK(max_principal_sine(orthonormal(A), est.S_par) < 1e-8);
}

TEST_CASE("projection") {
  Rng rng = make_stream({5});
  const CMat S = orthonormal(complex_gaussian_matrix(rng, 7, 3));
  const CMat X = complex_gaussian_matrix(rng, 4, 3);  // B x N
  const CMat Ytil = (X * S.adjoint()).adjoint();
  CHECK((project(Ytil, S).adjoint() - X).norm() < 1e-12);
  CHECK((project(Ytil, CMat::Identity(7, 7)) - Ytil).norm() == 0.0);
  CHECK_THROWS_AS(project(Ytil, CMat::Identity(6, 6)), InvalidArgument);

  double in = 0.0, out = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const CMat W = complex_gaussian_matrix(rng, 7, 5);
    in += W.squaredNorm();
    out += project(W, S).squaredNorm();
  }
  CHECK(out / in == doctest::Approx(3.0 / 7.0).epsilon(0.05));
}
