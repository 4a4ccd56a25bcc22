#pragma once

#include <optional>
#include <utility>

#include "fframes/linalg.hpp"

namespace fframes {

/// A finite family of vectors psi_1..psi_n in F^d, stored as the columns of
/// the synthesis matrix. Finite families are always Bessel, so the three
/// frame-related operators are plain matrices:
///   synthesis  D : F^n -> F^d,  D c = sum_j c_j psi_j
///   analysis   C = D^H          C f = (<f, psi_j>)_j
///   frame op   S = D C          S f = sum_j <f, psi_j> psi_j
template <ScalarField S>
class Frame {
 public:
  explicit Frame(Matrix<S> vectors) : vectors_(std::move(vectors)) {
    if (vectors_.cols() < 1) throw Error("Frame: at least one vector required");
    if (!all_finite(vectors_)) throw NonFiniteInput("Frame: non-finite entries");
  }

  Eigen::Index ambient_dim() const { return vectors_.rows(); }
  Eigen::Index count() const { return vectors_.cols(); }

  const Matrix<S>& vectors() const { return vectors_; }
  Vector<S> vector(Eigen::Index j) const { return vectors_.col(j); }

  const Matrix<S>& synthesis() const { return vectors_; }
  Matrix<S> analysis() const { return vectors_.adjoint(); }
  Matrix<S> frame_operator() const { return vectors_ * vectors_.adjoint(); }
  Matrix<S> gram() const { return vectors_.adjoint() * vectors_; }

 private:
  Matrix<S> vectors_;
};

struct FrameReport {
  double lower_bound = 0.0;  // optimal A: smallest eigenvalue of S
  double upper_bound = 0.0;  // optimal B: largest eigenvalue of S
  std::optional<double> riesz_lower;  // Gram extremes, present only for Riesz bases
  std::optional<double> riesz_upper;
  bool is_bessel = true;
  bool is_frame = false;
  bool is_riesz_basis = false;
  bool is_tight = false;
  bool is_parseval = false;
  bool is_painless = false;
  std::optional<double> tight_constant;
};

/// Optimal bounds and class flags of a finite family.
template <ScalarField S>
FrameReport classify(const Frame<S>& psi, const Tolerance& tol = {}) {
  const Matrix<S> s = psi.frame_operator();
  const SpectralBounds sb = spectral_bounds<S>(s, tol);
  FrameReport rep;
  rep.lower_bound = sb.lambda_min;
  rep.upper_bound = sb.lambda_max;
  rep.is_frame = sb.lambda_min > tol.tau_rank * sb.lambda_max;
  rep.is_riesz_basis = rep.is_frame && psi.count() == psi.ambient_dim();

  const double snorm = s.norm();
  const double d = double(psi.ambient_dim());
  const double tight_candidate = std::real(S(s.trace())) / d;
  const Matrix<S> scaled_id = Matrix<S>::Identity(s.rows(), s.cols()) * S(tight_candidate);
  rep.is_tight = (s - scaled_id).norm() <= tol.tau_res * snorm;
  if (rep.is_tight) rep.tight_constant = tight_candidate;
  rep.is_parseval = rep.is_tight && std::abs(tight_candidate - 1.0) <= tol.tau_res;

  Matrix<S> off = s;
  off.diagonal().setZero();
  rep.is_painless = off.norm() <= tol.tau_res * snorm;

  if (rep.is_riesz_basis) {
    const SpectralBounds gb = spectral_bounds<S>(psi.gram(), tol);
    rep.riesz_lower = gb.lambda_min;
    rep.riesz_upper = gb.lambda_max;
  }
  return rep;
}

/// Canonical dual (S^{-1} psi_j)_j; its frame operator is S^{-1} and its
/// optimal bounds are the reciprocals of the original ones.
template <ScalarField S>
Frame<S> canonical_dual(const Frame<S>& psi, const Tolerance& tol = {}) {
  const Matrix<S> s = psi.frame_operator();
  const SpectralBounds sb = spectral_bounds<S>(s, tol);
  if (!(sb.lambda_min > tol.tau_rank * sb.lambda_max))
    throw NotAFrame("canonical_dual: family is not a frame (frame operator singular at tolerance)");
  return Frame<S>(s.ldlt().solve(psi.synthesis()));
}

template <ScalarField S>
struct Reconstruction {
  Vector<S> reconstructed;
  double residual = 0.0;  // ‖f_rec − f‖ / max(1, ‖f‖)
};

/// Perfect reconstruction f = sum_j <f, dual_j> psi_j via the canonical dual.
template <ScalarField S>
Reconstruction<S> reconstruct(const Frame<S>& psi, const Vector<S>& f, const Tolerance& tol = {}) {
  if (f.size() != psi.ambient_dim()) throw DimensionMismatch("reconstruct: signal length != ambient dimension");
  const Frame<S> dual = canonical_dual(psi, tol);
  const Vector<S> coeffs = dual.analysis() * f;
  Reconstruction<S> out;
  out.reconstructed = psi.synthesis() * coeffs;
  out.residual = (out.reconstructed - f).norm() / std::max(1.0, f.norm());
  return out;
}

/// Relative residuals of D† = C S^{-1} and C† = S^{-1} D, comparing the SVD
/// pseudo-inverse against the closed forms. For Riesz bases the same
/// quantities double as inverse checks.
template <ScalarField S>
std::pair<double, double> pseudo_identity_check(const Frame<S>& psi, const Tolerance& tol = {}) {
  const Matrix<S> s = psi.frame_operator();
  const SpectralBounds sb = spectral_bounds<S>(s, tol);
  if (!(sb.lambda_min > tol.tau_rank * sb.lambda_max))
    throw NotAFrame("pseudo_identity_check: family is not a frame");
  const auto ldlt = s.ldlt();
  const Matrix<S> synth_formula = Matrix<S>(ldlt.solve(psi.synthesis())).adjoint();  // C S^{-1}
  const Matrix<S> analysis_formula = ldlt.solve(psi.synthesis());                    // S^{-1} D
  const double synth_res = relative_residual(pseudo_inverse<S>(psi.synthesis(), tol), synth_formula);
  const double analysis_res = relative_residual(pseudo_inverse<S>(Matrix<S>(psi.analysis()), tol), analysis_formula);
  return {synth_res, analysis_res};
}

}  // namespace fframes
