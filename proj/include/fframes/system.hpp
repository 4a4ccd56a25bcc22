#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fframes/frame.hpp"
#include "fframes/fusion.hpp"
#include "fframes/hilbert_sum.hpp"

namespace fframes {

/// A fusion frame (V_i, v_i) equipped with one local frame phi^(i) per
/// subspace, stored in V_i coordinates. Induces the global frame
/// (v_i phi_ij) and connects three operator layers: local, fusion, global.
template <ScalarField S>
class FusionFrameSystem {
 public:
  FusionFrameSystem(FusionFrame<S> fusion, std::vector<Frame<S>> locals, double common_lower,
                    double common_upper)
      : fusion_(std::move(fusion)),
        locals_(std::move(locals)),
        common_lower_(common_lower),
        common_upper_(common_upper) {}

  const FusionFrame<S>& fusion() const { return fusion_; }
  const std::vector<Frame<S>>& locals() const { return locals_; }
  const Frame<S>& local(std::size_t i) const { return locals_[i]; }
  std::size_t member_count() const { return locals_.size(); }

  /// Common local frame bounds A = min_i A_i, B = max_i B_i.
  double common_lower() const { return common_lower_; }
  double common_upper() const { return common_upper_; }

  Eigen::Index ambient_dim() const { return fusion_.ambient_dim(); }

  /// Total number of global frame vectors, N = sum_i |J_i|.
  Eigen::Index total_vector_count() const {
    Eigen::Index n = 0;
    for (const auto& l : locals_) n += l.count();
    return n;
  }

  /// l2(J_1) ⊕ ... ⊕ l2(J_k), the coefficient side of the local layer.
  DirectSumSpace<S> coefficient_space() const {
    std::vector<Eigen::Index> dims;
    dims.reserve(locals_.size());
    for (const auto& l : locals_) dims.push_back(l.count());
    return DirectSumSpace<S>::coordinate_spaces(dims);
  }

  /// ⊕ D_{phi^(i)} : coefficient space -> representation space.
  BlockDiagonalOperator<S> local_synthesis() const {
    std::vector<Matrix<S>> blocks;
    blocks.reserve(locals_.size());
    for (const auto& l : locals_) blocks.push_back(l.synthesis());
    return BlockDiagonalOperator<S>(coefficient_space(), fusion_.rep_space(), std::move(blocks));
  }

  /// ⊕ C_{phi^(i)} : representation space -> coefficient space.
  BlockDiagonalOperator<S> local_analysis() const {
    std::vector<Matrix<S>> blocks;
    blocks.reserve(locals_.size());
    for (const auto& l : locals_) blocks.push_back(l.analysis());
    return BlockDiagonalOperator<S>(fusion_.rep_space(), coefficient_space(), std::move(blocks));
  }

  /// ⊕ S_{phi^(i)} on the representation space.
  BlockDiagonalOperator<S> local_frame_operators() const {
    std::vector<Matrix<S>> blocks;
    blocks.reserve(locals_.size());
    for (const auto& l : locals_) blocks.push_back(l.frame_operator());
    return BlockDiagonalOperator<S>(fusion_.rep_space(), fusion_.rep_space(), std::move(blocks));
  }

 private:
  FusionFrame<S> fusion_;
  std::vector<Frame<S>> locals_;
  double common_lower_;
  double common_upper_;
};

/// Validates one local frame per member (each spanning its subspace) and
/// records the common local bounds.
template <ScalarField S>
FusionFrameSystem<S> build_system(FusionFrame<S> fusion, std::vector<Frame<S>> locals,
                                  const Tolerance& tol = {}) {
  if (locals.size() != fusion.member_count())
    throw DimensionMismatch("build_system: local frame count != member count");
  double common_lower = 0.0, common_upper = 0.0;
  for (std::size_t i = 0; i < locals.size(); ++i) {
    if (locals[i].ambient_dim() != fusion.member(i).subspace.dim())
      throw DimensionMismatch("build_system: local frame " + std::to_string(i) +
                              " does not live in the coordinates of subspace " + std::to_string(i));
    const FrameReport rep = classify(locals[i], tol);
    if (!rep.is_frame)
      throw LocalNotAFrame(i, "build_system: local family " + std::to_string(i) +
                                  " is not a frame for its subspace");
    common_lower = (i == 0) ? rep.lower_bound : std::min(common_lower, rep.lower_bound);
    common_upper = (i == 0) ? rep.upper_bound : std::max(common_upper, rep.upper_bound);
  }
  return FusionFrameSystem<S>(std::move(fusion), std::move(locals), common_lower, common_upper);
}

/// The induced global frame (v_i B_i phi_ij), flat-ordered by block, with the
/// (member, local index) pair of every column.
template <ScalarField S>
struct GlobalFrame {
  Frame<S> frame;
  std::vector<std::pair<std::size_t, Eigen::Index>> flat_index;
};

template <ScalarField S>
GlobalFrame<S> global_frame(const FusionFrameSystem<S>& sys) {
  const auto& fusion = sys.fusion();
  Matrix<S> vectors(fusion.ambient_dim(), sys.total_vector_count());
  std::vector<std::pair<std::size_t, Eigen::Index>> index;
  index.reserve(static_cast<std::size_t>(sys.total_vector_count()));
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < sys.member_count(); ++i) {
    const auto& m = fusion.member(i);
    const auto& local = sys.local(i);
    vectors.middleCols(at, local.count()) = S(m.weight) * (m.subspace.basis() * local.synthesis());
    for (Eigen::Index j = 0; j < local.count(); ++j) index.emplace_back(i, j);
    at += local.count();
  }
  return GlobalFrame<S>{Frame<S>(std::move(vectors)), std::move(index)};
}

/// Coefficient tuples over the J_i concatenate isometrically to flat global
/// coefficient vectors.
template <ScalarField S>
Vector<S> flatten(const FusionFrameSystem<S>& sys, const BlockVector<S>& coeffs) {
  if (!coeffs.space.same_shape(sys.coefficient_space()))
    throw ShapeMismatch("flatten: block coefficients do not match the local frame sizes");
  return flatten(coeffs);
}

template <ScalarField S>
BlockVector<S> unflatten(const FusionFrameSystem<S>& sys, const Vector<S>& flat) {
  return unflatten(sys.coefficient_space(), flat);
}

/// Residuals of the six operator identities connecting the three layers:
/// the global operators factor through the fusion operators and the local
/// block operators, and conversely the fusion operators are recovered from
/// the global ones through the canonical local duals.
struct IdentityReport {
  struct Entry {
    std::string name;
    double residual = 0.0;
    bool pass = false;
  };
  std::array<Entry, 6> entries;
  double tolerance = 0.0;

  bool all_pass() const {
    for (const auto& e : entries)
      if (!e.pass) return false;
    return true;
  }
};

template <ScalarField S>
IdentityReport verify_operator_identities(const FusionFrameSystem<S>& sys, const Tolerance& tol = {}) {
  const auto& fusion = sys.fusion();
  const GlobalFrame<S> global = global_frame(sys);

  // left-hand sides from the direct constructions
  const Matrix<S> d_global = global.frame.synthesis();
  const Matrix<S> c_global = global.frame.analysis();
  const Matrix<S> s_global = global.frame.frame_operator();
  const Matrix<S> d_fusion = fusion.synthesis();
  const Matrix<S> c_fusion = fusion.analysis();
  const Matrix<S> s_fusion = fusion.frame_operator();

  // block-diagonal factors of the right-hand sides
  const Matrix<S> local_synth = embed_dense(sys.local_synthesis());
  const Matrix<S> local_analysis = embed_dense(sys.local_analysis());
  const Matrix<S> local_frame_ops = embed_dense(sys.local_frame_operators());

  std::vector<Matrix<S>> dual_analysis_blocks;   // C_i S_i^{-1}
  std::vector<Matrix<S>> dual_synthesis_blocks;  // S_i^{-1} D_i
  std::vector<Matrix<S>> sandwich_blocks;        // C_i S_i^{-2} D_i
  for (std::size_t i = 0; i < sys.member_count(); ++i) {
    const Matrix<S> s_i = sys.local(i).frame_operator();
    const auto ldlt = s_i.ldlt();
    const Matrix<S> dual_synth = ldlt.solve(sys.local(i).synthesis());  // S_i^{-1} D_i
    dual_synthesis_blocks.push_back(dual_synth);
    dual_analysis_blocks.push_back(dual_synth.adjoint());
    sandwich_blocks.push_back(dual_synth.adjoint() * dual_synth);  // C_i S_i^{-2} D_i
  }
  const auto coeff_space = sys.coefficient_space();
  const auto& rep_space = fusion.rep_space();
  const Matrix<S> dual_analysis =
      embed_dense(BlockDiagonalOperator<S>(rep_space, coeff_space, std::move(dual_analysis_blocks)));
  const Matrix<S> dual_synthesis =
      embed_dense(BlockDiagonalOperator<S>(coeff_space, rep_space, std::move(dual_synthesis_blocks)));
  const Matrix<S> sandwich =
      embed_dense(BlockDiagonalOperator<S>(coeff_space, coeff_space, std::move(sandwich_blocks)));

  IdentityReport rep;
  rep.tolerance = tol.tau_res;
  rep.entries[0] = {"global_synthesis_factorization",
                    relative_residual(d_global, Matrix<S>(d_fusion * local_synth)), false};
  rep.entries[1] = {"global_analysis_factorization",
                    relative_residual(c_global, Matrix<S>(local_analysis * c_fusion)), false};
  rep.entries[2] = {"global_frame_operator_factorization",
                    relative_residual(s_global, Matrix<S>(d_fusion * local_frame_ops * c_fusion)), false};
  rep.entries[3] = {"fusion_synthesis_recovery",
                    relative_residual(d_fusion, Matrix<S>(d_global * dual_analysis)), false};
  rep.entries[4] = {"fusion_analysis_recovery",
                    relative_residual(c_fusion, Matrix<S>(dual_synthesis * c_global)), false};
  rep.entries[5] = {"fusion_frame_operator_recovery",
                    relative_residual(s_fusion, Matrix<S>(d_global * sandwich * c_global)), false};
  for (auto& e : rep.entries) e.pass = e.residual <= rep.tolerance;
  return rep;
}

/// Per-member residuals of the commutation condition
/// pi_{V_i} S_V^{-1} S_{global} = S_{phi^(i)} pi_{V_i}, with the local frame
/// operator lifted to the ambient space by basis conjugation.
struct CommutationReport {
  std::vector<double> residuals;
  bool holds = false;
};

template <ScalarField S>
CommutationReport check_commutation_condition(const FusionFrameSystem<S>& sys,
                                              const Tolerance& tol = {}) {
  const auto& fusion = sys.fusion();
  const Matrix<S> s_fusion = fusion.frame_operator();
  const Matrix<S> s_global = global_frame(sys).frame.frame_operator();
  const Matrix<S> corrected = s_fusion.ldlt().solve(s_global);  // S_V^{-1} S_global
  CommutationReport rep;
  rep.holds = true;
  for (std::size_t i = 0; i < sys.member_count(); ++i) {
    const Matrix<S>& basis = fusion.member(i).subspace.basis();
    const Matrix<S> lhs = basis * (basis.adjoint() * corrected);
    const Matrix<S> rhs = basis * sys.local(i).frame_operator() * basis.adjoint();
    const double res = relative_residual(lhs, rhs);
    rep.residuals.push_back(res);
    if (res > tol.tau_res) rep.holds = false;
  }
  return rep;
}

enum class InverseMethod { RieszFormula, CommutationFormula, Direct };

inline const char* to_string(InverseMethod m) {
  switch (m) {
    case InverseMethod::RieszFormula: return "riesz_formula";
    case InverseMethod::CommutationFormula: return "commutation_formula";
    case InverseMethod::Direct: return "direct";
  }
  return "unknown";
}

template <ScalarField S>
struct InverseGlobalResult {
  Matrix<S> inverse;
  InverseMethod method = InverseMethod::Direct;
  double product_residual = 0.0;      // ‖inverse * S_global − I‖ relative
  double direct_match_residual = 0.0; // distance to the directly inverted operator
};

/// Inverse of the global frame operator, preferring the structural formulas:
/// the fusion-Riesz route C_V^{-1} (⊕ S_i^{-1}) D_V^{-1}, the pseudo-inverse
/// route C_V† (⊕ S_i^{-1}) D_V† under the commutation condition, and direct
/// inversion otherwise. Whichever route fires is cross-checked against the
/// direct inverse.
template <ScalarField S>
InverseGlobalResult<S> inverse_global_frame_operator(const FusionFrameSystem<S>& sys,
                                                     const Tolerance& tol = {}) {
  const auto& fusion = sys.fusion();
  const Matrix<S> s_global = global_frame(sys).frame.frame_operator();
  const SpectralBounds sb = spectral_bounds<S>(s_global, tol);
  if (!(sb.lambda_min > tol.tau_rank * sb.lambda_max))
    throw NotAFrame("inverse_global_frame_operator: global family is not a frame");
  const Eigen::Index d = s_global.rows();
  const Matrix<S> eye = Matrix<S>::Identity(d, d);
  const Matrix<S> direct = s_global.ldlt().solve(eye);

  std::vector<Matrix<S>> inv_blocks;
  inv_blocks.reserve(sys.member_count());
  for (std::size_t i = 0; i < sys.member_count(); ++i) {
    const Matrix<S> s_i = sys.local(i).frame_operator();
    inv_blocks.push_back(s_i.ldlt().solve(Matrix<S>::Identity(s_i.rows(), s_i.cols())));
  }
  const auto& rep_space = fusion.rep_space();
  const Matrix<S> middle =
      embed_dense(BlockDiagonalOperator<S>(rep_space, rep_space, std::move(inv_blocks)));

  InverseGlobalResult<S> out;
  if (fusion_classify(fusion, tol).is_fusion_riesz) {
    const Matrix<S> d_fusion = fusion.synthesis();
    const Matrix<S> c_fusion = fusion.analysis();
    out.inverse = c_fusion.partialPivLu().solve(middle * d_fusion.partialPivLu().inverse());
    out.method = InverseMethod::RieszFormula;
  } else if (check_commutation_condition(sys, tol).holds) {
    const Matrix<S> d_dagger = pseudo_inverse<S>(fusion.synthesis(), tol);
    const Matrix<S> c_dagger = pseudo_inverse<S>(fusion.analysis(), tol);
    out.inverse = c_dagger * middle * d_dagger;
    out.method = InverseMethod::CommutationFormula;
  } else {
    out.inverse = direct;
    out.method = InverseMethod::Direct;
  }
  out.product_residual = relative_residual(Matrix<S>(out.inverse * s_global), eye);
  out.direct_match_residual = relative_residual(out.inverse, direct);
  return out;
}

/// Centralized and distributed reconstruction of one signal, plus the
/// largest distance between the canonical dual vectors and the distributed
/// dual vectors.
template <ScalarField S>
struct DualReconstruction {
  Vector<S> centralized;
  Vector<S> distributed;
  double centralized_residual = 0.0;
  double distributed_residual = 0.0;
  double dual_gap = 0.0;    // max_(i,j) ‖S_g^{-1} psi_ij − S_V^{-1} S_i^{-1} psi_ij‖
  double dual_scale = 0.0;  // max_(i,j) ‖S_g^{-1} psi_ij‖
};

template <ScalarField S>
DualReconstruction<S> reconstruct_both(const FusionFrameSystem<S>& sys, const Vector<S>& f,
                                       const Tolerance& tol = {}) {
  if (f.size() != sys.ambient_dim())
    throw DimensionMismatch("reconstruct_both: signal length != ambient dimension");
  const auto& fusion = sys.fusion();
  const GlobalFrame<S> global = global_frame(sys);
  const Matrix<S> s_global = global.frame.frame_operator();
  const SpectralBounds sb = spectral_bounds<S>(s_global, tol);
  if (!(sb.lambda_min > tol.tau_rank * sb.lambda_max))
    throw NotAFrame("reconstruct_both: global family is not a frame");

  const Matrix<S> canonical_duals = s_global.ldlt().solve(global.frame.synthesis());

  const auto fusion_ldlt = fusion.frame_operator().ldlt();
  Matrix<S> distributed_duals(sys.ambient_dim(), sys.total_vector_count());
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < sys.member_count(); ++i) {
    const auto& m = fusion.member(i);
    const Matrix<S> s_i = sys.local(i).frame_operator();
    const Matrix<S> local_duals = s_i.ldlt().solve(sys.local(i).synthesis());  // S_i^{-1} Phi_i
    distributed_duals.middleCols(at, sys.local(i).count()) =
        fusion_ldlt.solve(S(m.weight) * (m.subspace.basis() * local_duals));
    at += sys.local(i).count();
  }

  const Vector<S> coeffs = global.frame.analysis() * f;
  DualReconstruction<S> out;
  out.centralized = canonical_duals * coeffs;
  out.distributed = distributed_duals * coeffs;
  const double scale = std::max(1.0, f.norm());
  out.centralized_residual = (out.centralized - f).norm() / scale;
  out.distributed_residual = (out.distributed - f).norm() / scale;
  for (Eigen::Index j = 0; j < canonical_duals.cols(); ++j) {
    out.dual_gap = std::max(out.dual_gap, (canonical_duals.col(j) - distributed_duals.col(j)).norm());
    out.dual_scale = std::max(out.dual_scale, canonical_duals.col(j).norm());
  }
  return out;
}

/// One row of the equivalence "global frame is Riesz iff the fusion frame is
/// fusion Riesz and every local frame is Riesz", with the admissible Riesz
/// bound inequalities evaluated when both sides hold.
struct RieszEquivalenceReport {
  bool global_riesz = false;
  bool fusion_riesz = false;
  bool locals_all_riesz = false;
  bool equivalent = false;  // global_riesz == (fusion_riesz && locals_all_riesz)
  double common_lower = 0.0;  // A
  double common_upper = 0.0;  // B
  std::optional<double> global_riesz_lower, global_riesz_upper;
  std::optional<double> fusion_riesz_lower, fusion_riesz_upper;
  std::optional<bool> lower_bound_admissible;  // alpha_V * A <= alpha_global
  std::optional<bool> upper_bound_admissible;  // beta_global <= beta_V * B
};

template <ScalarField S>
RieszEquivalenceReport riesz_equivalence_report(const FusionFrameSystem<S>& sys,
                                                const Tolerance& tol = {}) {
  RieszEquivalenceReport rep;
  rep.common_lower = sys.common_lower();
  rep.common_upper = sys.common_upper();

  const FrameReport global_rep = classify(global_frame(sys).frame, tol);
  rep.global_riesz = global_rep.is_riesz_basis;
  rep.global_riesz_lower = global_rep.riesz_lower;
  rep.global_riesz_upper = global_rep.riesz_upper;

  const FusionReport fusion_rep = fusion_classify(sys.fusion(), tol);
  rep.fusion_riesz = fusion_rep.is_fusion_riesz;
  rep.fusion_riesz_lower = fusion_rep.riesz_lower;
  rep.fusion_riesz_upper = fusion_rep.riesz_upper;

  rep.locals_all_riesz = true;
  for (const auto& l : sys.locals())
    if (!classify(l, tol).is_riesz_basis) rep.locals_all_riesz = false;

  rep.equivalent = rep.global_riesz == (rep.fusion_riesz && rep.locals_all_riesz);

  if (rep.global_riesz && rep.fusion_riesz) {
    const double slack = 1.0 + tol.tau_res;
    rep.lower_bound_admissible =
        *rep.fusion_riesz_lower * rep.common_lower <= *rep.global_riesz_lower * slack;
    rep.upper_bound_admissible =
        *rep.global_riesz_upper <= *rep.fusion_riesz_upper * rep.common_upper * slack;
  }
  return rep;
}

enum class LocalTightPattern { None, Parseval, CommonTight, MixedTight };

inline const char* to_string(LocalTightPattern p) {
  switch (p) {
    case LocalTightPattern::None: return "none";
    case LocalTightPattern::Parseval: return "parseval";
    case LocalTightPattern::CommonTight: return "common_tight";
    case LocalTightPattern::MixedTight: return "mixed_tight";
  }
  return "unknown";
}

/// Tightness inheritance between the layers: when the locals are tight, the
/// global frame operator collapses onto the fusion one (S_global = S_V,
/// A * S_V, or the reweighted S_W), the corresponding properties transfer
/// both ways, and conversely the structure identity forces the block
/// operator ⊕(c_i I − S_i) to vanish on the range of C_V — on all of the
/// representation space when the fusion frame is a fusion Riesz basis, which
/// pins every local down to c_i-tightness.
struct TightStructureReport {
  LocalTightPattern pattern = LocalTightPattern::None;
  std::vector<double> local_tight_constants;
  std::optional<double> common_constant;
  std::optional<double> structure_residual;
  bool structure_ok = false;
  std::optional<bool> parseval_transfer_ok;
  std::optional<bool> tight_transfer_ok;
  std::optional<bool> painless_transfer_ok;
  std::optional<double> annihilation_residual;
  std::optional<double> forced_local_tight_residual;
  std::optional<bool> locals_forced_tight_ok;
};

template <ScalarField S>
TightStructureReport tight_structure_report(const FusionFrameSystem<S>& sys,
                                            const Tolerance& tol = {}) {
  TightStructureReport rep;
  const auto& fusion = sys.fusion();

  std::vector<FrameReport> local_reps;
  local_reps.reserve(sys.member_count());
  bool all_tight = true;
  for (const auto& l : sys.locals()) {
    local_reps.push_back(classify(l, tol));
    if (!local_reps.back().is_tight) all_tight = false;
  }
  if (!all_tight) return rep;

  for (const auto& r : local_reps) rep.local_tight_constants.push_back(*r.tight_constant);
  bool all_one = true, all_equal = true;
  const double first = rep.local_tight_constants.front();
  for (double c : rep.local_tight_constants) {
    if (std::abs(c - 1.0) > tol.tau_res) all_one = false;
    if (std::abs(c - first) > tol.tau_res * std::max(1.0, std::abs(first))) all_equal = false;
  }
  rep.pattern = all_one ? LocalTightPattern::Parseval
                        : (all_equal ? LocalTightPattern::CommonTight : LocalTightPattern::MixedTight);
  if (rep.pattern == LocalTightPattern::CommonTight) rep.common_constant = first;

  // structure identity for the detected pattern
  const Matrix<S> s_global = global_frame(sys).frame.frame_operator();
  const Matrix<S> s_fusion = fusion.frame_operator();
  Matrix<S> expected;
  switch (rep.pattern) {
    case LocalTightPattern::Parseval:
      expected = s_fusion;
      break;
    case LocalTightPattern::CommonTight:
      expected = S(first) * s_fusion;
      break;
    default: {
      std::vector<WeightedSubspace<S>> reweighted;
      for (std::size_t i = 0; i < sys.member_count(); ++i)
        reweighted.emplace_back(fusion.member(i).subspace,
                                std::sqrt(rep.local_tight_constants[i]) * fusion.member(i).weight);
      expected = FusionFrame<S>(fusion.ambient_dim(), std::move(reweighted)).frame_operator();
      break;
    }
  }
  rep.structure_residual = relative_residual(s_global, expected);
  rep.structure_ok = *rep.structure_residual <= tol.tau_res;

  // property transfer between the fusion frame and the global frame
  const FusionReport fusion_rep = fusion_classify(fusion, tol);
  const FrameReport global_rep = classify(global_frame(sys).frame, tol);
  if (rep.pattern == LocalTightPattern::Parseval) {
    rep.parseval_transfer_ok = fusion_rep.is_parseval == global_rep.is_parseval;
    bool tight_ok = fusion_rep.is_tight == global_rep.is_tight;
    if (fusion_rep.is_tight && global_rep.is_tight)
      tight_ok = tight_ok && std::abs(*fusion_rep.tight_constant - *global_rep.tight_constant) <=
                                 tol.tau_res * std::max(1.0, *fusion_rep.tight_constant);
    rep.tight_transfer_ok = tight_ok;
  } else if (rep.pattern == LocalTightPattern::CommonTight) {
    rep.tight_transfer_ok = fusion_rep.is_tight == global_rep.is_tight;
  }
  if (rep.pattern != LocalTightPattern::MixedTight)
    rep.painless_transfer_ok = fusion_rep.is_painless == global_rep.is_painless;

  // converse: the structure identity annihilates ⊕(c_i I − S_i) on R(C_V)
  if (rep.structure_ok) {
    std::vector<Matrix<S>> defect_blocks;
    for (std::size_t i = 0; i < sys.member_count(); ++i) {
      const Matrix<S> s_i = sys.local(i).frame_operator();
      defect_blocks.push_back(S(rep.local_tight_constants[i]) *
                                  Matrix<S>::Identity(s_i.rows(), s_i.cols()) -
                              s_i);
    }
    const Matrix<S> defect = embed_dense(
        BlockDiagonalOperator<S>(fusion.rep_space(), fusion.rep_space(), std::move(defect_blocks)));
    const Matrix<S> c_fusion = fusion.analysis();
    const double cnorm = c_fusion.norm();
    rep.annihilation_residual = cnorm > 0 ? (defect * c_fusion).norm() / cnorm : 0.0;

    if (fusion_rep.is_fusion_riesz) {
      double worst = 0.0;
      for (std::size_t i = 0; i < sys.member_count(); ++i) {
        const Matrix<S> s_i = sys.local(i).frame_operator();
        const Matrix<S> target = S(rep.local_tight_constants[i]) *
                                 Matrix<S>::Identity(s_i.rows(), s_i.cols());
        worst = std::max(worst, relative_residual(s_i, target));
      }
      rep.forced_local_tight_residual = worst;
      rep.locals_forced_tight_ok = worst <= tol.tau_res;
    }
  }
  return rep;
}

}  // namespace fframes
