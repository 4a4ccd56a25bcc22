#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <type_traits>

#include "fframes/errors.hpp"

namespace fframes {

/// The scalar field of a workspace: real or complex, fixed per computation.
template <class S>
concept ScalarField = std::same_as<S, double> || std::same_as<S, std::complex<double>>;

template <ScalarField S>
inline constexpr bool is_complex_field = std::same_as<S, std::complex<double>>;

template <ScalarField S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

template <ScalarField S>
using Vector = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using RealMatrix = Matrix<double>;
using RealVector = Vector<double>;
using ComplexMatrix = Matrix<std::complex<double>>;
using ComplexVector = Vector<std::complex<double>>;

/// Workspace-wide tolerances. tau_rank decides numerical rank (relative
/// singular-value cutoff), tau_res accepts operator identities (relative,
/// Frobenius-scaled), tau_orth accepts orthonormality of stored bases.
struct Tolerance {
  double tau_rank = 1e-12;
  double tau_res = 1e-9;
  double tau_orth = 1e-9;

  void validate() const {
    if (!(tau_rank > 0.0) || !(tau_res > 0.0) || !(tau_orth > 0.0) || !(tau_rank < 1.0))
      throw Error("Tolerance: all cutoffs must be positive and tau_rank < 1");
  }
};

template <class Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

/// ‖A − B‖_F scaled by the larger of the two norms (0 for two zero inputs).
template <class DA, class DB>
double relative_residual(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  const double scale = std::max(a.norm(), b.norm());
  const double diff = (a - b).norm();
  return scale > 0.0 ? diff / scale : diff;
}

template <ScalarField S>
double spectral_norm(const Matrix<S>& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix<S>> svd(m);
  return svd.singularValues()(0);
}

/// A closed subspace of F^d held as an orthonormal basis; the projection
/// pi_V is basis * basis^H.
template <ScalarField S>
class Subspace {
 public:
  Subspace(Eigen::Index ambient_dim, Matrix<S> basis, const Tolerance& tol = {})
      : ambient_(ambient_dim), basis_(std::move(basis)) {
    if (ambient_ < 0 || basis_.rows() != ambient_ || basis_.cols() > ambient_)
      throw DimensionMismatch("Subspace: basis shape inconsistent with ambient dimension");
    if (!all_finite(basis_)) throw NonFiniteInput("Subspace: basis has non-finite entries");
    if (basis_.cols() > 0) {
      const Matrix<S> gram = basis_.adjoint() * basis_;
      const Matrix<S> eye = Matrix<S>::Identity(basis_.cols(), basis_.cols());
      if ((gram - eye).norm() > tol.tau_orth * std::sqrt(double(basis_.cols())))
        throw NotASubspace("Subspace: basis columns are not orthonormal at tau_orth");
    }
  }

  /// The whole coordinate space F^d with its canonical basis.
  static Subspace full(Eigen::Index d) {
    return Subspace(d, Matrix<S>::Identity(d, d));
  }

  static Subspace zero(Eigen::Index d) { return Subspace(d, Matrix<S>(d, 0)); }

  Eigen::Index ambient_dim() const { return ambient_; }
  Eigen::Index dim() const { return basis_.cols(); }
  const Matrix<S>& basis() const { return basis_; }

  Matrix<S> projector() const { return basis_ * basis_.adjoint(); }

  /// Orthogonal projection of f onto this subspace.
  Vector<S> project(const Vector<S>& f) const {
    if (f.size() != ambient_) throw DimensionMismatch("project: vector length != ambient dimension");
    return basis_ * (basis_.adjoint() * f);
  }

  /// Coordinates of f with respect to the stored basis (basis^H f).
  Vector<S> coordinates(const Vector<S>& f) const {
    if (f.size() != ambient_) throw DimensionMismatch("coordinates: vector length != ambient dimension");
    return basis_.adjoint() * f;
  }

  /// Ambient vector with the given coordinates (basis * c).
  Vector<S> embed(const Vector<S>& coords) const {
    if (coords.size() != dim()) throw DimensionMismatch("embed: coordinate length != subspace dimension");
    return basis_ * coords;
  }

  /// ‖f − pi_V f‖ / max(1, ‖f‖); zero iff f lies in the subspace.
  double membership_residual(const Vector<S>& f) const {
    return (f - project(f)).norm() / std::max(1.0, f.norm());
  }

 private:
  Eigen::Index ambient_;
  Matrix<S> basis_;
};

/// Orthonormal basis of the column space of `vectors`, with numerical rank
/// decided by singular values >= tau_rank * sigma_max.
template <ScalarField S>
Subspace<S> orthonormalize(const Matrix<S>& vectors, const Tolerance& tol = {}) {
  if (!all_finite(vectors)) throw NonFiniteInput("orthonormalize: non-finite entries");
  const Eigen::Index d = vectors.rows();
  if (vectors.cols() == 0) return Subspace<S>::zero(d);
  Eigen::JacobiSVD<Matrix<S>> svd(vectors, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? tol.tau_rank * sv(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  return Subspace<S>(d, svd.matrixU().leftCols(rank), tol);
}

template <ScalarField S>
Vector<S> project(const Subspace<S>& v, const Vector<S>& f) {
  return v.project(f);
}

/// Moore-Penrose pseudo-inverse via SVD with relative cutoff tau_rank.
template <ScalarField S>
Matrix<S> pseudo_inverse(const Matrix<S>& u, const Tolerance& tol = {}) {
  if (!all_finite(u)) throw NonFiniteInput("pseudo_inverse: non-finite entries");
  if (u.rows() == 0 || u.cols() == 0) return Matrix<S>::Zero(u.cols(), u.rows());
  Eigen::JacobiSVD<Matrix<S>> svd(u, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cutoff = tol.tau_rank * sv(0);
  Vector<S> inv = Vector<S>::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) inv(i) = S(1.0 / sv(i));
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

/// Numerical rank at the tau_rank cutoff.
template <ScalarField S>
Eigen::Index numerical_rank(const Matrix<S>& u, const Tolerance& tol = {}) {
  if (u.rows() == 0 || u.cols() == 0) return 0;
  Eigen::JacobiSVD<Matrix<S>> svd(u);
  const auto& sv = svd.singularValues();
  const double cutoff = tol.tau_rank * sv(0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  return rank;
}

struct SpectralBounds {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  /// Smallest eigenvalue above tau_rank * lambda_max (0 when none is).
  double lambda_min_nonzero = 0.0;
};

/// Eigenvalue extremes of a self-adjoint positive semidefinite matrix.
template <ScalarField S>
SpectralBounds spectral_bounds(const Matrix<S>& m, const Tolerance& tol = {}) {
  if (!all_finite(m)) throw NonFiniteInput("spectral_bounds: non-finite entries");
  if (m.rows() != m.cols()) throw DimensionMismatch("spectral_bounds: matrix not square");
  if (m.rows() == 0) return {};
  const double scale = m.norm();
  if ((m - Matrix<S>(m.adjoint())).norm() > tol.tau_res * scale)
    throw NotSelfAdjoint("spectral_bounds: matrix is not self-adjoint at tau_res");
  Eigen::SelfAdjointEigenSolver<Matrix<S>> es(m, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  SpectralBounds out;
  out.lambda_min = ev(0);
  out.lambda_max = ev(ev.size() - 1);
  if (out.lambda_min < -tol.tau_res * scale)
    throw NotPositiveSemidefinite("spectral_bounds: negative eigenvalue beyond tolerance");
  const double cutoff = tol.tau_rank * out.lambda_max;
  out.lambda_min_nonzero = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > cutoff) {
      out.lambda_min_nonzero = ev(i);
      break;
    }
  }
  return out;
}

}  // namespace fframes
