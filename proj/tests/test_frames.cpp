#include <doctest.h>

#include <cmath>
#include <complex>

#include "fframes/frame.hpp"
#include "fframes/random_gen.hpp"

using namespace fframes;
using Complex = std::complex<double>;

namespace {

Frame<double> coordinate_pair() {
  return Frame<double>(RealMatrix::Identity(2, 2));
}

Frame<double> doubled_first_axis() {
  RealMatrix m(2, 3);
  m << 1.0, 1.0, 0.0, 0.0, 0.0, 1.0;  // e1, e1, e2
  return Frame<double>(m);
}

Frame<double> mercedes_benz() {
  const double r3 = std::sqrt(3.0);
  RealMatrix m(2, 3);
  m << 0.0, -r3 / 2.0, r3 / 2.0, 1.0, -0.5, -0.5;
  return Frame<double>(m);
}

// direct-summation oracle for the frame operator: sum_j psi_j psi_j^H
template <ScalarField S>
Matrix<S> frame_operator_oracle(const Frame<S>& psi) {
  Matrix<S> s = Matrix<S>::Zero(psi.ambient_dim(), psi.ambient_dim());
  for (Eigen::Index j = 0; j < psi.count(); ++j)
    s += psi.vector(j) * psi.vector(j).adjoint();
  return s;
}

}  // namespace

TEST_CASE("frame operators of small fixtures") {
  const auto onb = coordinate_pair();
  CHECK((onb.synthesis() - RealMatrix::Identity(2, 2)).norm() <= 1e-15);
  CHECK((onb.frame_operator() - RealMatrix::Identity(2, 2)).norm() <= 1e-15);

  const auto doubled = doubled_first_axis();
  RealMatrix expected = RealMatrix::Zero(2, 2);
  expected(0, 0) = 2.0;
  expected(1, 1) = 1.0;
  CHECK((doubled.frame_operator() - expected).norm() <= 1e-15);
  CHECK((doubled.analysis() - RealMatrix(doubled.synthesis().transpose())).norm() <= 1e-15);
  CHECK((doubled.frame_operator() - frame_operator_oracle(doubled)).norm() <= 1e-15);
}

TEST_CASE("the Mercedes-Benz frame is 3/2-tight") {
  const auto mb = mercedes_benz();
  const RealMatrix oracle = frame_operator_oracle(mb);
  CHECK((oracle - 1.5 * RealMatrix::Identity(2, 2)).norm() <= 1e-12);
  CHECK((mb.frame_operator() - oracle).norm() <= 1e-14);

  const FrameReport rep = classify(mb);
  CHECK(rep.is_frame);
  CHECK(rep.is_tight);
  CHECK(!rep.is_parseval);
  CHECK(!rep.is_riesz_basis);
  CHECK(*rep.tight_constant == doctest::Approx(1.5));
  CHECK(rep.lower_bound == doctest::Approx(1.5));
  CHECK(rep.upper_bound == doctest::Approx(1.5));
}

TEST_CASE("classification of coordinate fixtures") {
  const FrameReport onb = classify(coordinate_pair());
  CHECK(onb.is_frame);
  CHECK(onb.is_parseval);
  CHECK(onb.is_riesz_basis);
  CHECK(onb.is_painless);
  CHECK(onb.lower_bound == doctest::Approx(1.0));
  CHECK(onb.upper_bound == doctest::Approx(1.0));
  CHECK(*onb.riesz_lower == doctest::Approx(1.0));

  const FrameReport doubled = classify(doubled_first_axis());
  CHECK(doubled.is_frame);
  CHECK(!doubled.is_riesz_basis);  // three vectors in the plane
  CHECK(doubled.is_painless);      // diagonal frame operator
  CHECK(!doubled.is_tight);
  CHECK(doubled.lower_bound == doctest::Approx(1.0));
  CHECK(doubled.upper_bound == doctest::Approx(2.0));
}

TEST_CASE("canonical duals of the fixtures") {
  const auto onb = coordinate_pair();
  const auto onb_dual = canonical_dual(onb);
  CHECK((onb_dual.vectors() - onb.vectors()).norm() <= 1e-14);

  const auto doubled = doubled_first_axis();
  const auto dual = canonical_dual(doubled);
  RealMatrix expected(2, 3);
  expected << 0.5, 0.5, 0.0, 0.0, 0.0, 1.0;
  CHECK((dual.vectors() - expected).norm() <= 1e-14);

  const auto mb = mercedes_benz();
  const auto mb_dual = canonical_dual(mb);
  CHECK((mb_dual.vectors() - (2.0 / 3.0) * mb.vectors()).norm() <= 1e-13);

  // dual frame operator is the inverse, bounds are reciprocals
  const RealMatrix product = mb_dual.frame_operator() * mb.frame_operator();
  CHECK((product - RealMatrix::Identity(2, 2)).norm() <= 1e-12);
  const FrameReport mb_rep = classify(mb);
  const FrameReport dual_rep = classify(mb_dual);
  CHECK(dual_rep.lower_bound == doctest::Approx(1.0 / mb_rep.upper_bound));
  CHECK(dual_rep.upper_bound == doctest::Approx(1.0 / mb_rep.lower_bound));

  RealMatrix degenerate(2, 1);
  degenerate << 1.0, 0.0;
  CHECK_THROWS_AS(canonical_dual(Frame<double>(degenerate)), NotAFrame);
}

TEST_CASE("reconstruction through the canonical dual") {
  SplitMix64 rng(3);
  const auto onb = coordinate_pair();
  const RealVector f = random_vector<double>(rng, 2);
  const auto rec = reconstruct(onb, f);
  CHECK(rec.residual <= 1e-12);

  const auto doubled = doubled_first_axis();
  const RealVector e1 = RealVector::Unit(2, 0);
  const RealVector coeffs = canonical_dual(doubled).analysis() * e1;
  CHECK(coeffs(0) == doctest::Approx(0.5));
  CHECK(coeffs(1) == doctest::Approx(0.5));
  CHECK(coeffs(2) == doctest::Approx(0.0));
  CHECK(reconstruct(doubled, e1).residual <= 1e-12);

  const auto mb = mercedes_benz();
  for (int trial = 0; trial < 5; ++trial)
    CHECK(reconstruct(mb, random_vector<double>(rng, 2)).residual <= 1e-9);
}

TEST_CASE("pseudo-inverse identities for synthesis and analysis") {
  const auto parseval = coordinate_pair();
  auto [synth_res, analysis_res] = pseudo_identity_check(parseval);
  CHECK(synth_res <= 1e-12);
  CHECK(analysis_res <= 1e-12);

  auto [d_res, c_res] = pseudo_identity_check(doubled_first_axis());
  CHECK(d_res <= 1e-12);
  CHECK(c_res <= 1e-12);

  SplitMix64 rng(5);
  const auto random6 = random_frame<double>(rng, 4, 6);
  auto [r1, r2] = pseudo_identity_check(random6);
  CHECK(r1 <= 1e-9);
  CHECK(r2 <= 1e-9);
}

TEST_CASE("frame inequality witness with optimal bounds") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index d = rng.uniform_int(1, 8);
    const Eigen::Index n = rng.uniform_int(d, 2 * d + 2);
    const auto psi = random_frame<double>(rng, d, n);
    const FrameReport rep = classify(psi);
    for (int probe = 0; probe < 4; ++probe) {
      const RealVector f = random_vector<double>(rng, d);
      const double energy = (psi.analysis() * f).squaredNorm();
      const double fsq = f.squaredNorm();
      CHECK(energy >= rep.lower_bound * fsq - 1e-9 * std::max(1.0, rep.upper_bound * fsq));
      CHECK(energy <= rep.upper_bound * fsq + 1e-9 * std::max(1.0, rep.upper_bound * fsq));
    }
  }
}

TEST_CASE("tight frames reconstruct by plain averaging") {
  SplitMix64 rng(13);
  const auto mb = mercedes_benz();
  const FrameReport rep = classify(mb);
  REQUIRE(rep.is_tight);
  const double a = *rep.tight_constant;
  for (int trial = 0; trial < 5; ++trial) {
    const RealVector f = random_vector<double>(rng, 2);
    const RealVector averaged = (mb.synthesis() * (mb.analysis() * f)) / a;
    CHECK((averaged - f).norm() <= 1e-12 * std::max(1.0, f.norm()));
  }
}

TEST_CASE("the canonical dual is an involution") {
  SplitMix64 rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index d = rng.uniform_int(1, 6);
    const Eigen::Index n = rng.uniform_int(d, 2 * d + 1);
    const auto psi = random_frame<double>(rng, d, n);
    const auto twice = canonical_dual(canonical_dual(psi));
    CHECK((twice.vectors() - psi.vectors()).norm() <= 1e-9 * std::max(1.0, psi.vectors().norm()));
  }
}

TEST_CASE("both orderings of dual reconstruction agree") {
  SplitMix64 rng(29);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index d = rng.uniform_int(1, 6);
    const Eigen::Index n = rng.uniform_int(d, 2 * d + 1);
    const auto psi = random_frame<double>(rng, d, n);
    const auto dual = canonical_dual(psi);
    const RealVector f = random_vector<double>(rng, d);
    const RealVector via_dual_coeffs = psi.synthesis() * (dual.analysis() * f);
    const RealVector via_frame_coeffs = dual.synthesis() * (psi.analysis() * f);
    const double scale = std::max(1.0, f.norm());
    CHECK((via_dual_coeffs - f).norm() <= 1e-9 * scale);
    CHECK((via_frame_coeffs - f).norm() <= 1e-9 * scale);
  }
}

TEST_CASE("Riesz bounds sandwich coefficient energies") {
  SplitMix64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index d = rng.uniform_int(1, 7);
    const auto psi = random_frame<double>(rng, d, d);  // conditioned square: a Riesz basis
    const FrameReport rep = classify(psi);
    REQUIRE(rep.is_riesz_basis);
    for (int probe = 0; probe < 4; ++probe) {
      const RealVector c = random_vector<double>(rng, d);
      const double combo = (psi.synthesis() * c).squaredNorm();
      const double energy = c.squaredNorm();
      CHECK(combo >= *rep.riesz_lower * energy - 1e-9 * std::max(1.0, combo));
      CHECK(combo <= *rep.riesz_upper * energy + 1e-9 * std::max(1.0, combo));
    }
  }
}

TEST_CASE("complex frames round through the same machinery") {
  SplitMix64 rng(37);
  const auto psi = random_frame<Complex>(rng, 3, 5);
  const FrameReport rep = classify(psi);
  CHECK(rep.is_frame);
  const auto dual = canonical_dual(psi);
  const ComplexVector f = random_vector<Complex>(rng, 3);
  const ComplexVector rec = psi.synthesis() * (dual.analysis() * f);
  CHECK((rec - f).norm() <= 1e-9 * std::max(1.0, f.norm()));
  auto [r1, r2] = pseudo_identity_check(psi);
  CHECK(r1 <= 1e-9);
  CHECK(r2 <= 1e-9);
}
