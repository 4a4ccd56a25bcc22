#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "fframes/frame.hpp"
#include "fframes/hilbert_sum.hpp"

namespace fframes {

template <ScalarField S>
struct WeightedSubspace {
  Subspace<S> subspace;
  double weight;

  WeightedSubspace(Subspace<S> v, double w) : subspace(std::move(v)), weight(w) {
    if (!(weight > 0.0)) throw Error("WeightedSubspace: weight must be strictly positive");
    if (subspace.dim() < 1) throw Error("WeightedSubspace: subspace must have dimension >= 1");
  }
};

/// Weighted family (V_i, v_i) of closed subspaces of F^d. The representation
/// space is the Hilbert direct sum of the V_i; analysis output lives in
/// subspace coordinates, so
///   synthesis  D_V : block coords -> F^d,  (c_i) |-> sum_i v_i B_i c_i
///   analysis   C_V = D_V^H,                f |-> (v_i B_i^H f)_i
///   frame op   S_V = D_V C_V = sum_i v_i^2 pi_{V_i}
/// where B_i is the stored orthonormal basis of V_i.
template <ScalarField S>
class FusionFrame {
 public:
  FusionFrame(Eigen::Index ambient_dim, std::vector<WeightedSubspace<S>> members)
      : ambient_(ambient_dim), members_(std::move(members)) {
    if (members_.empty()) throw Error("FusionFrame: at least one member required");
    std::vector<Subspace<S>> blocks;
    blocks.reserve(members_.size());
    for (const auto& m : members_) {
      if (m.subspace.ambient_dim() != ambient_)
        throw DimensionMismatch("FusionFrame: member ambient dimension mismatch");
      blocks.push_back(m.subspace);
    }
    rep_space_ = DirectSumSpace<S>(std::move(blocks));
  }

  Eigen::Index ambient_dim() const { return ambient_; }
  std::size_t member_count() const { return members_.size(); }
  const WeightedSubspace<S>& member(std::size_t i) const { return members_[i]; }
  const std::vector<WeightedSubspace<S>>& members() const { return members_; }
  const DirectSumSpace<S>& rep_space() const { return rep_space_; }

  /// Total subspace dimension m = sum_i dim(V_i): column count of D_V.
  Eigen::Index total_subspace_dim() const { return rep_space_.total_dim(); }

  /// D_V as the horizontal stack of the weighted bases v_i B_i.
  Matrix<S> synthesis() const {
    Matrix<S> d(ambient_, total_subspace_dim());
    Eigen::Index at = 0;
    for (const auto& m : members_) {
      d.middleCols(at, m.subspace.dim()) = m.subspace.basis() * S(m.weight);
      at += m.subspace.dim();
    }
    return d;
  }

  Matrix<S> analysis() const { return synthesis().adjoint(); }

  Matrix<S> frame_operator() const {
    Matrix<S> s = Matrix<S>::Zero(ambient_, ambient_);
    for (const auto& m : members_)
      s += (m.weight * m.weight) * (m.subspace.basis() * m.subspace.basis().adjoint());
    return s;
  }

  Matrix<S> gram() const {
    const Matrix<S> d = synthesis();
    return d.adjoint() * d;
  }

  /// C_V f as a block vector: part i holds the coordinates of v_i pi_{V_i} f.
  BlockVector<S> analyze(const Vector<S>& f) const {
    if (f.size() != ambient_) throw DimensionMismatch("analyze: signal length != ambient dimension");
    std::vector<Vector<S>> parts;
    parts.reserve(members_.size());
    for (const auto& m : members_) parts.push_back(S(m.weight) * m.subspace.coordinates(f));
    return BlockVector<S>(rep_space_, std::move(parts));
  }

  /// D_V applied to a block vector of subspace coordinates.
  Vector<S> synthesize(const BlockVector<S>& coeffs) const {
    if (!coeffs.space.same_shape(rep_space_))
      throw SpaceMismatch("synthesize: block vector not in representation space");
    Vector<S> out = Vector<S>::Zero(ambient_);
    for (std::size_t i = 0; i < members_.size(); ++i)
      out += S(members_[i].weight) * members_[i].subspace.embed(coeffs.parts[i]);
    return out;
  }

 private:
  Eigen::Index ambient_;
  std::vector<WeightedSubspace<S>> members_;
  DirectSumSpace<S> rep_space_;
};

struct FusionReport {
  double lower_bound = 0.0;  // optimal A_V
  double upper_bound = 0.0;  // optimal B_V
  std::optional<double> riesz_lower;  // extremes of C_V D_V, present when fusion Riesz
  std::optional<double> riesz_upper;
  bool is_bessel = true;
  bool is_fusion_frame = false;
  bool is_fusion_riesz = false;
  bool is_tight = false;
  bool is_parseval = false;
  bool is_orthonormal_fusion_basis = false;
  bool is_painless = false;
  std::optional<double> tight_constant;
};

namespace detail {

/// Kronecker-delta criterion for fusion Riesz bases:
/// v_i^2 pi_{V_i} S_V^{-1} pi_{V_j} = delta_ij pi_{V_j} for all i, j.
template <ScalarField S>
bool fusion_riesz_delta_criterion(const FusionFrame<S>& v, const Matrix<S>& s_inv,
                                  const Tolerance& tol) {
  const std::size_t k = v.member_count();
  std::vector<Matrix<S>> projectors(k);
  for (std::size_t i = 0; i < k; ++i) projectors[i] = v.member(i).subspace.projector();
  for (std::size_t i = 0; i < k; ++i) {
    const double wi2 = v.member(i).weight * v.member(i).weight;
    const Matrix<S> left = wi2 * (projectors[i] * s_inv);
    for (std::size_t j = 0; j < k; ++j) {
      const Matrix<S> lhs = left * projectors[j];
      const Matrix<S> rhs = (i == j) ? projectors[j] : Matrix<S>::Zero(lhs.rows(), lhs.cols());
      if ((lhs - rhs).norm() > tol.tau_res * std::max(1.0, projectors[j].norm())) return false;
    }
  }
  return true;
}

}  // namespace detail

/// Optimal fusion bounds and class flags. Fusion Riesz membership is decided
/// two independent ways (bijectivity of D_V and the delta criterion) that
/// must agree; disagreement signals a tolerance pathology.
template <ScalarField S>
FusionReport fusion_classify(const FusionFrame<S>& v, const Tolerance& tol = {}) {
  const Matrix<S> s = v.frame_operator();
  const SpectralBounds sb = spectral_bounds<S>(s, tol);
  FusionReport rep;
  rep.lower_bound = sb.lambda_min;
  rep.upper_bound = sb.lambda_max;
  rep.is_fusion_frame = sb.lambda_min > tol.tau_rank * sb.lambda_max;

  // route 1: D_V bounded and bijective
  const Matrix<S> d = v.synthesis();
  bool riesz_by_synthesis = false;
  if (v.total_subspace_dim() == v.ambient_dim()) {
    Eigen::JacobiSVD<Matrix<S>> svd(d);
    const auto& sv = svd.singularValues();
    riesz_by_synthesis = sv(sv.size() - 1) > tol.tau_rank * sv(0);
  }
  // route 2: delta criterion, meaningful only once S_V is invertible
  bool riesz_by_delta = false;
  if (rep.is_fusion_frame) {
    const Matrix<S> s_inv = s.ldlt().solve(Matrix<S>::Identity(s.rows(), s.cols()));
    riesz_by_delta = detail::fusion_riesz_delta_criterion(v, s_inv, tol);
  }
  if (riesz_by_synthesis != riesz_by_delta)
    throw InternalInconsistency(
        "fusion_classify: synthesis bijectivity and delta criterion disagree on fusion Riesz");
  rep.is_fusion_riesz = riesz_by_synthesis;

  const double snorm = s.norm();
  const double tight_candidate = std::real(S(s.trace())) / double(v.ambient_dim());
  const Matrix<S> scaled_id = Matrix<S>::Identity(s.rows(), s.cols()) * S(tight_candidate);
  rep.is_tight = (s - scaled_id).norm() <= tol.tau_res * snorm;
  if (rep.is_tight) rep.tight_constant = tight_candidate;
  rep.is_parseval = rep.is_tight && std::abs(tight_candidate - 1.0) <= tol.tau_res;

  bool unit_weights = true;
  for (const auto& m : v.members())
    if (std::abs(m.weight - 1.0) > tol.tau_res) unit_weights = false;
  rep.is_orthonormal_fusion_basis =
      rep.is_parseval && unit_weights && v.total_subspace_dim() == v.ambient_dim();

  Matrix<S> off = s;
  off.diagonal().setZero();
  rep.is_painless = off.norm() <= tol.tau_res * snorm;

  if (rep.is_fusion_riesz) {
    const SpectralBounds gb = spectral_bounds<S>(v.gram(), tol);
    rep.riesz_lower = gb.lambda_min;
    rep.riesz_upper = gb.lambda_max;
  }
  return rep;
}

/// For a fusion Riesz basis, D_V^{-1} maps g_i in V_i to the block vector
/// with v_i^{-1} g_i at slot i and zeros elsewhere.
template <ScalarField S>
BlockVector<S> fusion_inverse_restriction(const FusionFrame<S>& v, std::size_t i,
                                          const Vector<S>& g_i, const Tolerance& tol = {}) {
  if (i >= v.member_count()) throw DimensionMismatch("fusion_inverse_restriction: member index out of range");
  if (!fusion_classify(v, tol).is_fusion_riesz)
    throw NotFusionRiesz("fusion_inverse_restriction: family is not a fusion Riesz basis");
  const auto& m = v.member(i);
  if (m.subspace.membership_residual(g_i) > tol.tau_res)
    throw NotInSubspace("fusion_inverse_restriction: vector does not lie in the requested subspace");
  BlockVector<S> out = BlockVector<S>::zero(v.rep_space());
  out.parts[i] = m.subspace.coordinates(g_i) / S(m.weight);
  return out;
}

/// Perfect reconstruction, both operator orderings:
///   f = sum_i v_i^2 pi_{V_i} S_V^{-1} f = sum_i v_i^2 S_V^{-1} pi_{V_i} f.
/// Returns the first ordering's result and the larger of the two residuals.
template <ScalarField S>
Reconstruction<S> fusion_reconstruct(const FusionFrame<S>& v, const Vector<S>& f,
                                     const Tolerance& tol = {}) {
  if (f.size() != v.ambient_dim())
    throw DimensionMismatch("fusion_reconstruct: signal length != ambient dimension");
  const Matrix<S> s = v.frame_operator();
  const SpectralBounds sb = spectral_bounds<S>(s, tol);
  if (!(sb.lambda_min > tol.tau_rank * sb.lambda_max))
    throw NotAFusionFrame("fusion_reconstruct: family is not a fusion frame");
  const auto ldlt = s.ldlt();

  const Vector<S> corrected = ldlt.solve(f);
  Vector<S> project_last = Vector<S>::Zero(f.size());
  Vector<S> projected = Vector<S>::Zero(f.size());
  for (const auto& m : v.members()) {
    const double w2 = m.weight * m.weight;
    project_last += S(w2) * m.subspace.project(corrected);
    projected += S(w2) * m.subspace.project(f);
  }
  const Vector<S> correct_last = ldlt.solve(projected);

  const double scale = std::max(1.0, f.norm());
  Reconstruction<S> out;
  out.reconstructed = project_last;
  out.residual = std::max((project_last - f).norm(), (correct_last - f).norm()) / scale;
  return out;
}

/// Relative residuals of D_V† = C_V S_V^{-1} and C_V† = S_V^{-1} D_V.
template <ScalarField S>
std::pair<double, double> fusion_pseudo_identity_check(const FusionFrame<S>& v,
                                                       const Tolerance& tol = {}) {
  const Matrix<S> s = v.frame_operator();
  const SpectralBounds sb = spectral_bounds<S>(s, tol);
  if (!(sb.lambda_min > tol.tau_rank * sb.lambda_max))
    throw NotAFusionFrame("fusion_pseudo_identity_check: family is not a fusion frame");
  const auto ldlt = s.ldlt();
  const Matrix<S> d = v.synthesis();
  const Matrix<S> analysis_formula = ldlt.solve(d);                    // S^{-1} D_V
  const Matrix<S> synth_formula = analysis_formula.adjoint();          // C_V S^{-1}
  const double synth_res = relative_residual(pseudo_inverse<S>(d, tol), synth_formula);
  const double analysis_res =
      relative_residual(pseudo_inverse<S>(Matrix<S>(d.adjoint()), tol), analysis_formula);
  return {synth_res, analysis_res};
}

}  // namespace fframes
