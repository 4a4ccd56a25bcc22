#include <doctest.h>

#include <cmath>
#include <complex>

#include "fframes/linalg.hpp"
#include "fframes/random_gen.hpp"

using namespace fframes;
using Complex = std::complex<double>;

namespace {

// test-side rank-revealing SVD, independent of the pseudo_inverse under test
template <ScalarField S>
struct RankedSvd {
  Matrix<S> range_basis;  // left singular vectors of the numerical range
  Matrix<S> null_basis;   // right singular vectors of the numerical kernel
  Eigen::Index rank;
};

template <ScalarField S>
RankedSvd<S> ranked_svd(const Matrix<S>& u, double tau_rank = 1e-12) {
  Eigen::JacobiSVD<Matrix<S>> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? tau_rank * sv(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  return {svd.matrixU().leftCols(rank), svd.matrixV().rightCols(u.cols() - rank), rank};
}

// a random matrix with prescribed numerical rank
template <ScalarField S>
Matrix<S> random_rank_matrix(SplitMix64& rng, Eigen::Index rows, Eigen::Index cols,
                             Eigen::Index rank) {
  if (rank == 0) return Matrix<S>::Zero(rows, cols);
  return random_conditioned_matrix<S>(rng, rows, rank) *
         random_conditioned_matrix<S>(rng, rank, cols);
}

// the three relations characterizing the pseudo-inverse, checked against a
// test-side SVD of U
template <ScalarField S>
void check_pseudo_inverse_relations(const Matrix<S>& u) {
  const Matrix<S> dagger = pseudo_inverse<S>(u);
  const RankedSvd<S> svd = ranked_svd<S>(u);
  const double scale = std::max(1.0, dagger.norm());

  // U U† x = x on R(U)
  CHECK((u * dagger * u - u).norm() <= 1e-9 * std::max(1.0, u.norm()));
  // N(U†) = R(U)^perp: U† kills the orthocomplement of the range ...
  const Matrix<S> co_range =
      Matrix<S>::Identity(u.rows(), u.rows()) - svd.range_basis * svd.range_basis.adjoint();
  CHECK((dagger * co_range).norm() <= 1e-9 * scale);
  // R(U†) = N(U)^perp: columns of U† are orthogonal to the kernel ...
  CHECK((svd.null_basis.adjoint() * dagger).norm() <= 1e-9 * scale);
  // ... and rank equality upgrades both inclusions to equalities
  CHECK(ranked_svd<S>(dagger).rank == svd.rank);
}

}  // namespace

TEST_CASE("orthonormalize keeps already orthonormal columns") {
  RealMatrix m = RealMatrix::Zero(3, 2);
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;
  const auto sub = orthonormalize<double>(m);
  CHECK(sub.dim() == 2);
  CHECK(sub.ambient_dim() == 3);
  // spans exactly e1, e2: projector is the coordinate projection
  RealMatrix expected = RealMatrix::Zero(3, 3);
  expected(0, 0) = expected(1, 1) = 1.0;
  CHECK((sub.projector() - expected).norm() <= 1e-12);
}

TEST_CASE("orthonormalize collapses dependent columns") {
  RealMatrix m(2, 2);
  m << 1.0, 2.0, 0.0, 0.0;  // e1 and 2*e1
  const auto sub = orthonormalize<double>(m);
  CHECK(sub.dim() == 1);
  CHECK(std::abs(std::abs(sub.basis()(0, 0)) - 1.0) <= 1e-12);
  CHECK(std::abs(sub.basis()(1, 0)) <= 1e-12);
}

TEST_CASE("orthonormalize of a rotated basis spans the whole plane") {
  const double s = 1.0 / std::sqrt(2.0);
  RealMatrix m(2, 2);
  m << s, s, s, -s;
  const auto sub = orthonormalize<double>(m);
  CHECK(sub.dim() == 2);
  const RealMatrix gram = sub.basis().transpose() * sub.basis();
  CHECK((gram - RealMatrix::Identity(2, 2)).norm() <= 1e-12);
  CHECK((sub.projector() - RealMatrix::Identity(2, 2)).norm() <= 1e-12);
}

TEST_CASE("orthonormalize rejects non-finite input") {
  RealMatrix m(2, 1);
  m << 1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(orthonormalize<double>(m), NonFiniteInput);
}

TEST_CASE("subspaces refuse non-orthonormal bases") {
  RealMatrix skew(2, 2);
  skew << 1.0, 1.0, 0.0, 1.0;
  CHECK_THROWS_AS(Subspace<double>(2, skew), NotASubspace);
  CHECK_THROWS_AS(Subspace<double>(3, RealMatrix::Identity(2, 2)), DimensionMismatch);
}

TEST_CASE("projection onto a coordinate axis") {
  const auto v = orthonormalize<double>(RealVector::Unit(2, 0));
  RealVector f(2);
  f << 3.0, 4.0;
  const RealVector p = v.project(f);
  CHECK(p(0) == doctest::Approx(3.0));
  CHECK(p(1) == doctest::Approx(0.0));
}

TEST_CASE("projection onto the full space is the identity") {
  const auto v = Subspace<double>::full(2);
  RealVector f(2);
  f << 3.0, 4.0;
  CHECK((v.project(f) - f).norm() <= 1e-15);
}

TEST_CASE("projection onto the diagonal line") {
  RealVector dir(2);
  dir << 1.0, 1.0;
  const auto v = orthonormalize<double>(dir);
  RealVector f(2);
  f << 1.0, 0.0;
  const RealVector p = v.project(f);
  CHECK(p(0) == doctest::Approx(0.5));
  CHECK(p(1) == doctest::Approx(0.5));
}

TEST_CASE("projection checks dimensions") {
  const auto v = Subspace<double>::full(2);
  CHECK_THROWS_AS(v.project(RealVector::Zero(3)), DimensionMismatch);
}

TEST_CASE("pseudo-inverse of the identity") {
  const RealMatrix id = RealMatrix::Identity(3, 3);
  CHECK((pseudo_inverse<double>(id) - id).norm() <= 1e-12);
}

TEST_CASE("pseudo-inverse of a singular diagonal") {
  RealMatrix m = RealMatrix::Zero(2, 2);
  m(0, 0) = 2.0;
  const RealMatrix dagger = pseudo_inverse<double>(m);
  CHECK(dagger(0, 0) == doctest::Approx(0.5));
  CHECK(std::abs(dagger(0, 1)) + std::abs(dagger(1, 0)) + std::abs(dagger(1, 1)) <= 1e-14);
}

TEST_CASE("pseudo-inverse of a single column matches the normal-equation oracle") {
  RealMatrix u(2, 1);
  u << 1.0, 1.0;
  // oracle on the range: U† = U^H (U U^H)^{-1} restricted to R(U), here
  // U† = (U^H U)^{-1} U^H = (0.5, 0.5)
  const RealMatrix oracle = (u.transpose() * u).inverse() * u.transpose();
  const RealMatrix dagger = pseudo_inverse<double>(u);
  CHECK((dagger - oracle).norm() <= 1e-12);
  CHECK((u * dagger * u - u).norm() <= 1e-12);
}

TEST_CASE("spectral bounds of diagonal fixtures") {
  RealMatrix m = RealMatrix::Zero(2, 2);
  m(0, 0) = 2.0;
  m(1, 1) = 1.0;
  auto b = spectral_bounds<double>(m);
  CHECK(b.lambda_min == doctest::Approx(1.0));
  CHECK(b.lambda_max == doctest::Approx(2.0));
  CHECK(b.lambda_min_nonzero == doctest::Approx(1.0));

  b = spectral_bounds<double>(RealMatrix::Identity(4, 4));
  CHECK(b.lambda_min == doctest::Approx(1.0));
  CHECK(b.lambda_max == doctest::Approx(1.0));
  CHECK(b.lambda_min_nonzero == doctest::Approx(1.0));

  RealMatrix m3 = RealMatrix::Zero(3, 3);
  m3(0, 0) = 3.0;
  m3(2, 2) = 1.0;
  b = spectral_bounds<double>(m3);
  CHECK(b.lambda_min == doctest::Approx(0.0));
  CHECK(b.lambda_max == doctest::Approx(3.0));
  CHECK(b.lambda_min_nonzero == doctest::Approx(1.0));
}

TEST_CASE("spectral bounds rejects non-self-adjoint and indefinite input") {
  RealMatrix m(2, 2);
  m << 0.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(spectral_bounds<double>(m), NotSelfAdjoint);
  RealMatrix neg = -RealMatrix::Identity(2, 2);
  CHECK_THROWS_AS(spectral_bounds<double>(neg), NotPositiveSemidefinite);
}

TEST_CASE("projectors are idempotent and self-adjoint on random subspaces") {
  SplitMix64 rng(17);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::Index d = rng.uniform_int(1, 12);
    const Eigen::Index k = rng.uniform_int(0, d);
    const auto sub = orthonormalize<double>(random_gaussian_matrix<double>(rng, d, k));
    const RealMatrix p = sub.projector();
    CHECK((p * p - p).norm() <= 1e-9 * std::max(1.0, p.norm()));
    CHECK((p - RealMatrix(p.transpose())).norm() <= 1e-9);
  }
  SplitMix64 crng(18);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::Index d = crng.uniform_int(1, 10);
    const Eigen::Index k = crng.uniform_int(0, d);
    const auto sub = orthonormalize<Complex>(random_gaussian_matrix<Complex>(crng, d, k));
    const ComplexMatrix p = sub.projector();
    CHECK((p * p - p).norm() <= 1e-9 * std::max(1.0, p.norm()));
    CHECK((p - ComplexMatrix(p.adjoint())).norm() <= 1e-9);
  }
}

TEST_CASE("pseudo-inverse satisfies its characterizing relations on all rank profiles") {
  SplitMix64 rng(41);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index rows = rng.uniform_int(1, 9);
    const Eigen::Index cols = rng.uniform_int(1, 9);
    const Eigen::Index rank = rng.uniform_int(0, std::min(rows, cols));
    check_pseudo_inverse_relations<double>(random_rank_matrix<double>(rng, rows, cols, rank));
  }
  // forced corners: zero matrix and full-rank square
  check_pseudo_inverse_relations<double>(RealMatrix::Zero(4, 3));
  SplitMix64 srng(42);
  check_pseudo_inverse_relations<double>(random_conditioned_matrix<double>(srng, 5, 5));
  for (int trial = 0; trial < 15; ++trial) {
    const Eigen::Index rows = srng.uniform_int(1, 7);
    const Eigen::Index cols = srng.uniform_int(1, 7);
    const Eigen::Index rank = srng.uniform_int(0, std::min(rows, cols));
    check_pseudo_inverse_relations<Complex>(random_rank_matrix<Complex>(srng, rows, cols, rank));
  }
}

TEST_CASE("pseudo-inverse commutes with the adjoint") {
  SplitMix64 rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index rows = rng.uniform_int(1, 8);
    const Eigen::Index cols = rng.uniform_int(1, 8);
    const Eigen::Index rank = rng.uniform_int(0, std::min(rows, cols));
    const ComplexMatrix u = random_rank_matrix<Complex>(rng, rows, cols, rank);
    const ComplexMatrix lhs = pseudo_inverse<Complex>(ComplexMatrix(u.adjoint()));
    const ComplexMatrix rhs = pseudo_inverse<Complex>(u).adjoint();
    CHECK((lhs - rhs).norm() <= 1e-9 * std::max(1.0, rhs.norm()));
  }
}

TEST_CASE("spectral bounds bracket the Rayleigh quotient") {
  SplitMix64 rng(44);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::Index d = rng.uniform_int(1, 10);
    const RealMatrix a = random_gaussian_matrix<double>(rng, d, d);
    const RealMatrix s = a * a.transpose();
    const auto b = spectral_bounds<double>(s);
    for (int probe = 0; probe < 5; ++probe) {
      RealVector f = random_vector<double>(rng, d);
      if (f.norm() == 0.0) continue;
      const double rayleigh = f.dot(s * f) / f.squaredNorm();
      CHECK(rayleigh >= b.lambda_min - 1e-9 * std::max(1.0, b.lambda_max));
      CHECK(rayleigh <= b.lambda_max * (1.0 + 1e-9) + 1e-12);
    }
  }
}
